#pragma once

#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "subfinsler/convex_set.hpp"
#include "subfinsler/polyhedron.hpp"
#include "subfinsler/types.hpp"

namespace subfinsler {

enum class NormFamily { kEuclidean, kL1, kLinf, kPolyhedral, kCorner, kRootSum };

enum class ConvexityClass { kPolyhedral, kStrictlyConvex, kStronglyConvex, kSmoothStronglyConvex };

std::string to_string(NormFamily f);
std::string to_string(ConvexityClass c);

struct InversionCheck {
  bool eta_in_subdiff_energy = false;
  bool fenchel_equality = false;
  bool u_in_subdiff_dual_energy = false;

  bool agree() const noexcept {
    return eta_in_subdiff_energy == fenchel_equality && fenchel_equality == u_in_subdiff_dual_energy;
  }
};

/// A norm on R^n from a closed family, with analytic dual norm, energies and
/// subdifferentials.
///
///   euclidean  sqrt(sum w_i v_i^2)
///   l1, linf   and general polyhedral norms max_{lambda in Lambda} lambda(v)
///   corner     rho + sqrt(a^2 + rho^2), a = v_axis, rho = |v_perp|
///   root_sum   sqrt(|v|_1^2 + |v|_2^2)
///
/// Covectors are passed as row vectors; subdifferentials of E live in V* but
/// are returned as ConvexSets of column coordinates.
class NormSpec {
 public:
  static NormSpec euclidean(int dim);
  static NormSpec euclidean(Vector weights);
  static NormSpec l1(int dim);
  static NormSpec linf(int dim);
  static NormSpec polyhedral(Polyhedron ball);
  static NormSpec corner(int dim, int axis);
  /// The corner norm on so(3) with axis e_1.
  static NormSpec so3();
  static NormSpec root_sum(int dim);

  NormFamily family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  int axis() const noexcept { return axis_; }
  const Vector& weights() const noexcept { return weights_; }
  bool is_polyhedral() const noexcept { return static_cast<bool>(ball_); }
  /// Unit ball of a polyhedral family; throws UnsupportedError otherwise.
  const Polyhedron& polyhedron() const;

  ConvexityClass convexity_class() const noexcept;

  double norm(const Vector& v) const;
  double dual_norm(const Covector& eta) const;
  double energy(const Vector& v) const;
  double dual_energy(const Covector& eta) const;

  /// {eta : ||eta||_* = ||u||, <eta,u> = ||u||^2}; {0} at u = 0.
  ConvexSet subdiff_energy(const Vector& u) const;
  /// {v : ||v|| = ||eta||_*, <eta,v> = ||eta||_*^2}; {0} at eta = 0.
  ConvexSet subdiff_dual_energy(const Covector& eta) const;
  /// Gradient of E* for the strictly convex families; throws
  /// UnsupportedError for polyhedral norms.
  Vector dual_gradient(const Covector& eta) const;
  /// Label of the analytic branch of dE* in use at eta. dE* is smooth away
  /// from points where the label changes.
  int dual_regime(const Covector& eta) const;

  InversionCheck check_duality_inversion(const Vector& u, const Covector& eta,
                                         double tol = kMembershipTol) const;

  nlohmann::json to_json() const;
  static NormSpec from_json(const nlohmann::json& j);

  friend bool operator==(const NormSpec& a, const NormSpec& b);

 private:
  NormSpec() = default;
  void check_dim(Eigen::Index n) const;

  NormFamily family_ = NormFamily::kEuclidean;
  int dim_ = 0;
  int axis_ = 0;
  Vector weights_;
  std::shared_ptr<const Polyhedron> ball_;
  // JSON family name when it differs from the canonical one ("so3").
  std::string alias_;
};

/// Star covering of a polyhedral norm's dual sphere; rejects other families.
StarCovering star_covering(const NormSpec& norm);

}  // namespace subfinsler
