#pragma once

#include <functional>
#include <optional>

#include "subfinsler/lie_group.hpp"
#include "subfinsler/norm.hpp"
#include "subfinsler/trajectory.hpp"

namespace subfinsler {

/// Quotient data for a Lie group epimorphism pi: G -> H given by its
/// differential at the identity, together with the norm pushed forward from
/// the polarization V of G to W = dpi(V):
///   ||w|| = inf { ||v|| : v in V, dpi(v) = w }.
class SubmetryData {
 public:
  const GroupSpec& source() const noexcept { return source_; }
  const GroupSpec& target() const noexcept { return target_; }
  /// dpi_e in algebra coordinates (target dim x source dim).
  const Matrix& differential() const noexcept { return dpi_; }
  /// dpi_e restricted to V, in polarization coordinates of both groups.
  const Matrix& differential_on_polarization() const noexcept { return dpi_v_; }
  const NormSpec& source_norm() const noexcept { return norm_; }

  /// The pushed ball conv(dpi(vertices)) when the source norm is polyhedral.
  const std::optional<NormSpec>& pushed_polyhedral() const noexcept { return pushed_; }

  double pushed_norm(const Vector& w) const;
  /// Dual of the pushed norm through the isometric embedding
  /// beta -> beta o dpi of W* into V*.
  double pushed_dual_norm(const Covector& beta) const;
  /// A preimage of w in V of minimal norm.
  Vector minimal_preimage(const Vector& w) const;
  /// beta o dpi_e, the covector on the source algebra.
  Covector lift_covector(const Covector& beta) const;

  /// Chart-level pi when it is known in closed form.
  bool has_projection() const noexcept { return static_cast<bool>(project_); }
  GroupElement project(const GroupElement& g) const;

  friend SubmetryData pushforward(const GroupSpec& source, const GroupSpec& target, const Matrix& dpi,
                                  const NormSpec& norm_v);
  friend SubmetryData heisenberg_abelianization(const NormSpec& norm_v, bool carnot);
  friend SubmetryData abelian_projection(int n, int m, const NormSpec& norm_v);

 private:
  SubmetryData(GroupSpec source, GroupSpec target, Matrix dpi, NormSpec norm)
      : source_(std::move(source)), target_(std::move(target)), dpi_(std::move(dpi)), norm_(std::move(norm)) {}

  GroupSpec source_;
  GroupSpec target_;
  Matrix dpi_;
  Matrix dpi_v_;
  Matrix kernel_v_;    // basis of ker(dpi) inside V, as columns
  Matrix right_inv_;   // minimum euclidean-norm right inverse of dpi_v_
  NormSpec norm_;
  std::optional<NormSpec> pushed_;
  std::function<Matrix(const Matrix&)> project_;
};

/// Validates that dpi is a surjective algebra homomorphism mapping V onto
/// the polarization of the target, and builds the pushforward norm.
SubmetryData pushforward(const GroupSpec& source, const GroupSpec& target, const Matrix& dpi,
                         const NormSpec& norm_v);

/// Heisenberg -> R^2, (X1, X2, X3) -> (X1, X2), for either polarization.
SubmetryData heisenberg_abelianization(const NormSpec& norm_v, bool carnot);

/// R^n -> R^m keeping the first m coordinates.
SubmetryData abelian_projection(int n, int m, const NormSpec& norm_v);

/// Lifts a horizontal curve of the target, sampled with piecewise constant
/// controls, by lifting each control to its minimal preimage and
/// integrating exactly from g0.
Trajectory lift_curve(const SubmetryData& sub, const Trajectory& curve, const GroupElement& g0);

}  // namespace subfinsler
