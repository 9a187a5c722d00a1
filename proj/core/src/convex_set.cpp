#include "subfinsler/convex_set.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "geometry.hpp"
#include "subfinsler/errors.hpp"

namespace subfinsler {

ConvexSet ConvexSet::singleton(Vector point) {
  if (!point.allFinite()) throw InputError("singleton with non-finite coordinates");
  ConvexSet s;
  s.kind_ = Kind::kSingleton;
  s.points_ = {std::move(point)};
  return s;
}

ConvexSet ConvexSet::polytope(std::vector<Vector> vertices) {
  if (vertices.empty()) throw InputError("polytope needs at least one vertex");
  const auto d = vertices.front().size();
  for (const auto& v : vertices) {
    if (v.size() != d) throw InputError("polytope vertices of mixed dimension");
    if (!v.allFinite()) throw InputError("polytope vertex with non-finite coordinates");
  }
  if (vertices.size() == 1) return singleton(std::move(vertices.front()));
  ConvexSet s;
  s.kind_ = Kind::kPolytope;
  s.points_ = std::move(vertices);
  return s;
}

ConvexSet ConvexSet::support(SupportOracle oracle) {
  if (!oracle.support || !oracle.contains || !oracle.sample) {
    throw InputError("support oracle requires support, contains and sample callbacks");
  }
  ConvexSet s;
  s.kind_ = Kind::kSupport;
  s.oracle_ = std::move(oracle);
  return s;
}

int ConvexSet::dim() const noexcept {
  if (kind_ == Kind::kSupport) return oracle_.dim;
  return static_cast<int>(points_.front().size());
}

const Vector& ConvexSet::point() const {
  if (kind_ != Kind::kSingleton) throw InputError("convex set is not a singleton");
  return points_.front();
}

std::vector<Vector> ConvexSet::vertices() const {
  if (kind_ == Kind::kSupport) throw InputError("oracle convex set has no vertex list");
  return points_;
}

double ConvexSet::support(const Vector& direction) const {
  if (direction.size() != dim()) throw InputError("support direction dimension mismatch");
  if (kind_ == Kind::kSupport) return oracle_.support(direction);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : points_) best = std::max(best, direction.dot(p));
  return best;
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) throw InputError("membership query dimension mismatch");
  switch (kind_) {
    case Kind::kSingleton:
      return (x - points_.front()).norm() <= tol;
    case Kind::kPolytope:
      return detail::hull_distance(x, points_) <= tol;
    case Kind::kSupport:
      return oracle_.contains(x, tol);
  }
  return false;
}

Vector ConvexSet::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::kSingleton:
      return points_.front();
    case Kind::kPolytope: {
      // Dirichlet(1,...,1) weights give a uniform point of the simplex of
      // weights, hence a random convex combination.
      std::exponential_distribution<double> expo(1.0);
      Vector acc = Vector::Zero(dim());
      double total = 0.0;
      for (const auto& p : points_) {
        const double w = expo(rng);
        acc += w * p;
        total += w;
      }
      return acc / total;
    }
    case Kind::kSupport:
      return oracle_.sample(rng);
  }
  return {};
}

std::vector<Vector> ConvexSet::members() const {
  if (kind_ == Kind::kSupport) return oracle_.witnesses;
  return points_;
}

ConvexSet ConvexSet::scaled(double alpha) const {
  if (kind_ != Kind::kSupport) {
    std::vector<Vector> pts = points_;
    for (auto& p : pts) p *= alpha;
    if (kind_ == Kind::kSingleton) return singleton(pts.front());
    return polytope(std::move(pts));
  }
  if (alpha == 0.0) return singleton(Vector::Zero(dim()));
  SupportOracle o;
  o.dim = oracle_.dim;
  o.approximate = oracle_.approximate;
  auto base = oracle_;
  o.support = [base, alpha](const Vector& d) { return base.support(alpha * d); };
  o.contains = [base, alpha](const Vector& x, double tol) { return base.contains(x / alpha, tol / std::abs(alpha)); };
  o.sample = [base, alpha](std::mt19937_64& rng) { return Vector(alpha * base.sample(rng)); };
  for (const auto& w : oracle_.witnesses) o.witnesses.push_back(alpha * w);
  return support(std::move(o));
}

nlohmann::json ConvexSet::to_json() const {
  using nlohmann::json;
  auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json j;
  switch (kind_) {
    case Kind::kSingleton:
      j["kind"] = "singleton";
      j["point"] = vec(points_.front());
      break;
    case Kind::kPolytope: {
      j["kind"] = "polytope";
      json verts = json::array();
      for (const auto& p : points_) verts.push_back(vec(p));
      j["vertices"] = verts;
      break;
    }
    case Kind::kSupport: {
      j["kind"] = "support";
      j["approximate"] = oracle_.approximate;
      // Support values along the signed coordinate axes and the diagonals.
      json samples = json::array();
      const int d = oracle_.dim;
      for (int i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector dir = Vector::Zero(d);
          dir(i) = s;
          samples.push_back({{"direction", vec(dir)}, {"value", oracle_.support(dir)}});
        }
      }
      for (double s : {1.0, -1.0}) {
        Vector dir = Vector::Constant(d, s / std::sqrt(static_cast<double>(d)));
        samples.push_back({{"direction", vec(dir)}, {"value", oracle_.support(dir)}});
      }
      j["support_samples"] = samples;
      break;
    }
  }
  return j;
}

ConvexSet minkowski_sum(const ConvexSet& a, const ConvexSet& b) {
  if (a.dim() != b.dim()) throw InputError("Minkowski sum of sets of different dimension");
  using Kind = ConvexSet::Kind;
  if (a.kind() != Kind::kSupport && b.kind() != Kind::kSupport) {
    std::vector<Vector> pts;
    for (const auto& p : a.vertices()) {
      for (const auto& q : b.vertices()) pts.push_back(p + q);
    }
    return ConvexSet::polytope(std::move(pts));
  }
  // Oracle sum: support functions add. Membership is only decidable exactly
  // when one summand is a point.
  ConvexSet::SupportOracle o;
  o.dim = a.dim();
  o.approximate = a.approximate() || b.approximate();
  o.support = [a, b](const Vector& d) { return a.support(d) + b.support(d); };
  if (a.kind() == Kind::kSingleton || b.kind() == Kind::kSingleton) {
    const bool a_point = a.kind() == Kind::kSingleton;
    const Vector shift = a_point ? a.point() : b.point();
    const ConvexSet rest = a_point ? b : a;
    o.contains = [shift, rest](const Vector& x, double tol) { return rest.contains(x - shift, tol); };
  } else {
    o.approximate = true;
    o.contains = [a, b](const Vector& x, double tol) {
      // Necessary condition checked on coordinate and diagonal directions.
      const int d = static_cast<int>(x.size());
      for (int i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector dir = Vector::Zero(d);
          dir(i) = s;
          if (dir.dot(x) > a.support(dir) + b.support(dir) + tol) return false;
        }
      }
      return true;
    };
  }
  o.sample = [a, b](std::mt19937_64& rng) { return Vector(a.sample(rng) + b.sample(rng)); };
  for (const auto& p : a.members()) {
    for (const auto& q : b.members()) o.witnesses.push_back(p + q);
  }
  return ConvexSet::support(std::move(o));
}

}  // namespace subfinsler
