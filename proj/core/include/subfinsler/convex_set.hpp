#pragma once

#include <functional>
#include <random>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "subfinsler/types.hpp"

namespace subfinsler {

/// Nonempty compact convex subset of V or V* (coordinates as column vectors).
///
/// Three representations are carried: a single point (gradients of smooth
/// energies), the convex hull of a vertex list (faces of polyhedral balls and
/// sums involving them), and a support-function oracle for sets such as the
/// disc-shaped subdifferential of a corner norm on its axis.
class ConvexSet {
 public:
  enum class Kind { kSingleton, kPolytope, kSupport };

  struct SupportOracle {
    int dim = 0;
    std::function<double(const Vector&)> support;
    std::function<bool(const Vector&, double)> contains;
    std::function<Vector(std::mt19937_64&)> sample;
    /// A few points of the set (not necessarily extreme), used by consumers
    /// that need explicit members.
    std::vector<Vector> witnesses;
    bool approximate = false;
  };

  static ConvexSet singleton(Vector point);
  static ConvexSet polytope(std::vector<Vector> vertices);
  static ConvexSet support(SupportOracle oracle);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept;
  bool approximate() const noexcept { return kind_ == Kind::kSupport && oracle_.approximate; }

  /// Singleton point; throws for other kinds.
  const Vector& point() const;
  /// Vertex list of a polytope (a singleton reports its point).
  std::vector<Vector> vertices() const;

  double support(const Vector& direction) const;
  bool contains(const Vector& x, double tol = kMembershipTol) const;
  Vector sample(std::mt19937_64& rng) const;
  /// Explicit members: the point, the vertices, or the oracle witnesses.
  std::vector<Vector> members() const;

  ConvexSet scaled(double alpha) const;

  nlohmann::json to_json() const;

 private:
  ConvexSet() = default;

  Kind kind_ = Kind::kSingleton;
  std::vector<Vector> points_;
  SupportOracle oracle_;
};

/// Minkowski sum A + B. Polytope/singleton combinations stay exact vertex
/// lists; anything involving an oracle becomes an oracle.
ConvexSet minkowski_sum(const ConvexSet& a, const ConvexSet& b);

}  // namespace subfinsler
