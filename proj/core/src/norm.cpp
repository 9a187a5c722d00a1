#include "subfinsler/norm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "subfinsler/errors.hpp"

namespace subfinsler {
namespace {

// Split of a corner-norm argument into the axis coordinate and the rest.
struct AxisSplit {
  double a;
  Vector perp;  // axis entry zeroed
  double rho;
};

AxisSplit split(const Vector& v, int axis) {
  AxisSplit s{v(axis), v, 0.0};
  s.perp(axis) = 0.0;
  s.rho = s.perp.norm();
  return s;
}

// Root of t = sum_i (|eta_i| - t)_+, the optimal split of the infimal
// convolution |.|_inf^2/2 box |.|_2^2/2.
double root_sum_threshold(const Covector& eta) {
  std::vector<double> x(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) x[static_cast<std::size_t>(i)] = std::abs(eta(i));
  std::sort(x.begin(), x.end(), std::greater<>());
  double partial = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = partial / static_cast<double>(k + 1);
    if (x[k] <= t) return t;
    partial += x[k];
  }
  return partial / static_cast<double>(x.size() + 1);
}

std::vector<Vector> sign_patterns(const Vector& u) {
  // Vertices of the subdifferential of |.|_1 at u.
  std::vector<Vector> out{Vector::Zero(u.size())};
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) != 0.0) {
      for (auto& s : out) s(i) = u(i) > 0.0 ? 1.0 : -1.0;
      continue;
    }
    std::vector<Vector> next;
    for (const auto& s : out) {
      for (double sign : {1.0, -1.0}) {
        Vector t = s;
        t(i) = sign;
        next.push_back(t);
      }
    }
    out = std::move(next);
  }
  return out;
}

// The disc a e_axis + {w_perp : |w_perp| <= radius}.
ConvexSet axis_disc(int dim, int axis, double a, double radius) {
  ConvexSet::SupportOracle o;
  o.dim = dim;
  o.support = [=](const Vector& d) {
    Vector dp = d;
    dp(axis) = 0.0;
    return d(axis) * a + radius * dp.norm();
  };
  o.contains = [=](const Vector& x, double tol) {
    Vector xp = x;
    xp(axis) = 0.0;
    return std::abs(x(axis) - a) <= tol && xp.norm() <= radius + tol;
  };
  o.sample = [=](std::mt19937_64& rng) {
    // Uniform in the (dim-1)-ball: gaussian direction, radius ~ U^(1/k).
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    Vector dir(dim);
    for (int i = 0; i < dim; ++i) dir(i) = gauss(rng);
    dir(axis) = 0.0;
    const double n = dir.norm();
    Vector x = Vector::Zero(dim);
    if (n > 0.0) {
      const double k = static_cast<double>(std::max(1, dim - 1));
      x = dir / n * radius * std::pow(unif(rng), 1.0 / k);
    }
    x(axis) = a;
    return x;
  };
  Vector center = Vector::Zero(dim);
  center(axis) = a;
  o.witnesses.push_back(center);
  for (int i = 0; i < dim; ++i) {
    if (i == axis) continue;
    for (double s : {1.0, -1.0}) {
      Vector w = center;
      w(i) = s * radius;
      o.witnesses.push_back(w);
    }
  }
  return ConvexSet::support(std::move(o));
}

std::vector<double> coords(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string to_string(NormFamily f) {
  switch (f) {
    case NormFamily::kEuclidean: return "euclidean";
    case NormFamily::kL1: return "l1";
    case NormFamily::kLinf: return "linf";
    case NormFamily::kPolyhedral: return "polyhedral";
    case NormFamily::kCorner: return "corner";
    case NormFamily::kRootSum: return "root_sum";
  }
  return "unknown";
}

std::string to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::kPolyhedral: return "polyhedral";
    case ConvexityClass::kStrictlyConvex: return "strictly-convex";
    case ConvexityClass::kStronglyConvex: return "strongly-convex";
    case ConvexityClass::kSmoothStronglyConvex: return "smooth-strongly-convex";
  }
  return "unknown";
}

NormSpec NormSpec::euclidean(int dim) {
  if (dim < 1) throw InputError("norm dimension must be positive");
  return euclidean(Vector::Ones(dim));
}

NormSpec NormSpec::euclidean(Vector weights) {
  if (weights.size() < 1) throw InputError("norm dimension must be positive");
  if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
    throw InputError("euclidean weights must be positive and finite");
  }
  NormSpec n;
  n.family_ = NormFamily::kEuclidean;
  n.dim_ = static_cast<int>(weights.size());
  n.weights_ = std::move(weights);
  return n;
}

NormSpec NormSpec::l1(int dim) {
  if (dim < 1) throw InputError("norm dimension must be positive");
  std::vector<Vector> verts;
  for (int i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      Vector v = Vector::Zero(dim);
      v(i) = s;
      verts.push_back(v);
    }
  }
  NormSpec n = polyhedral(Polyhedron::from_vertices(std::move(verts)));
  n.family_ = NormFamily::kL1;
  return n;
}

NormSpec NormSpec::linf(int dim) {
  if (dim < 1 || dim > Polyhedron::kMaxDim) throw InputError("linf norm supports dimensions 1 to 4");
  std::vector<Vector> verts;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = (mask >> i) & 1 ? -1.0 : 1.0;
    verts.push_back(v);
  }
  NormSpec n = polyhedral(Polyhedron::from_vertices(std::move(verts)));
  n.family_ = NormFamily::kLinf;
  return n;
}

NormSpec NormSpec::polyhedral(Polyhedron ball) {
  NormSpec n;
  n.family_ = NormFamily::kPolyhedral;
  n.dim_ = ball.dim();
  n.ball_ = std::make_shared<const Polyhedron>(std::move(ball));
  return n;
}

NormSpec NormSpec::corner(int dim, int axis) {
  if (dim < 2) throw InputError("corner norm needs dimension at least 2");
  if (axis < 0 || axis >= dim) throw InputError("corner axis out of range");
  NormSpec n;
  n.family_ = NormFamily::kCorner;
  n.dim_ = dim;
  n.axis_ = axis;
  return n;
}

NormSpec NormSpec::so3() {
  NormSpec n = corner(3, 0);
  n.alias_ = "so3";
  return n;
}

NormSpec NormSpec::root_sum(int dim) {
  if (dim < 1) throw InputError("norm dimension must be positive");
  NormSpec n;
  n.family_ = NormFamily::kRootSum;
  n.dim_ = dim;
  return n;
}

const Polyhedron& NormSpec::polyhedron() const {
  if (!ball_) throw UnsupportedError(to_string(family_) + " norm has no polyhedral unit ball");
  return *ball_;
}

ConvexityClass NormSpec::convexity_class() const noexcept {
  switch (family_) {
    case NormFamily::kEuclidean: return ConvexityClass::kSmoothStronglyConvex;
    case NormFamily::kL1:
    case NormFamily::kLinf:
    case NormFamily::kPolyhedral: return ConvexityClass::kPolyhedral;
    case NormFamily::kCorner:
    case NormFamily::kRootSum: return ConvexityClass::kStronglyConvex;
  }
  return ConvexityClass::kStrictlyConvex;
}

void NormSpec::check_dim(Eigen::Index n) const {
  if (n != dim_) {
    throw InputError("dimension mismatch: norm has dimension " + std::to_string(dim_) + ", argument has " +
                     std::to_string(n));
  }
}

double NormSpec::norm(const Vector& v) const {
  check_dim(v.size());
  switch (family_) {
    case NormFamily::kEuclidean: return std::sqrt((weights_.array() * v.array().square()).sum());
    case NormFamily::kL1: return v.lpNorm<1>();
    case NormFamily::kLinf: return v.lpNorm<Eigen::Infinity>();
    case NormFamily::kPolyhedral: return ball_->norm(v);
    case NormFamily::kCorner: {
      const AxisSplit s = split(v, axis_);
      return s.rho + std::hypot(s.a, s.rho);
    }
    case NormFamily::kRootSum: {
      const double l1 = v.lpNorm<1>();
      return std::sqrt(l1 * l1 + v.squaredNorm());
    }
  }
  throw UnsupportedError("unknown norm family");
}

double NormSpec::dual_norm(const Covector& eta) const {
  check_dim(eta.size());
  switch (family_) {
    case NormFamily::kEuclidean: return std::sqrt((eta.transpose().array().square() / weights_.array()).sum());
    case NormFamily::kL1: return eta.lpNorm<Eigen::Infinity>();
    case NormFamily::kLinf: return eta.lpNorm<1>();
    case NormFamily::kPolyhedral: return ball_->dual_norm(eta);
    case NormFamily::kCorner: {
      const AxisSplit s = split(eta.transpose(), axis_);
      const double a = std::abs(s.a);
      if (a >= s.rho) return a;
      return (s.rho * s.rho + a * a) / (2.0 * s.rho);
    }
    case NormFamily::kRootSum: return std::sqrt(2.0 * dual_energy(eta));
  }
  throw UnsupportedError("unknown norm family");
}

double NormSpec::energy(const Vector& v) const {
  const double n = norm(v);
  return 0.5 * n * n;
}

double NormSpec::dual_energy(const Covector& eta) const {
  check_dim(eta.size());
  if (family_ == NormFamily::kRootSum) {
    const double t = root_sum_threshold(eta);
    const double excess = (eta.array().abs() - t).max(0.0).square().sum();
    return 0.5 * (t * t + excess);
  }
  const double n = dual_norm(eta);
  return 0.5 * n * n;
}

ConvexSet NormSpec::subdiff_energy(const Vector& u) const {
  check_dim(u.size());
  if (u.isZero(0.0)) return ConvexSet::singleton(Vector::Zero(dim_));
  switch (family_) {
    case NormFamily::kEuclidean: return ConvexSet::singleton(weights_.cwiseProduct(u));
    case NormFamily::kL1:
    case NormFamily::kLinf:
    case NormFamily::kPolyhedral: {
      const double n = ball_->norm(u);
      std::vector<Vector> pts;
      for (int j : ball_->active_functionals(u)) pts.push_back(n * ball_->functionals()[static_cast<std::size_t>(j)].transpose());
      return ConvexSet::polytope(std::move(pts));
    }
    case NormFamily::kCorner: {
      const AxisSplit s = split(u, axis_);
      if (s.rho == 0.0) return axis_disc(dim_, axis_, s.a, std::abs(s.a));
      const double n = s.rho + std::hypot(s.a, s.rho);
      return ConvexSet::singleton(n * (s.perp / s.rho + u / u.norm()));
    }
    case NormFamily::kRootSum: {
      const double l1 = u.lpNorm<1>();
      std::vector<Vector> pts;
      for (const auto& sgn : sign_patterns(u)) pts.push_back(l1 * sgn + u);
      return ConvexSet::polytope(std::move(pts));
    }
  }
  throw UnsupportedError("unknown norm family");
}

ConvexSet NormSpec::subdiff_dual_energy(const Covector& eta) const {
  check_dim(eta.size());
  if (eta.isZero(0.0)) return ConvexSet::singleton(Vector::Zero(dim_));
  if (is_polyhedral()) {
    const double n = ball_->dual_norm(eta);
    std::vector<Vector> pts;
    for (int i : ball_->face_of(eta).vertices) pts.push_back(n * ball_->vertices()[static_cast<std::size_t>(i)]);
    return ConvexSet::polytope(std::move(pts));
  }
  return ConvexSet::singleton(dual_gradient(eta));
}

Vector NormSpec::dual_gradient(const Covector& eta) const {
  check_dim(eta.size());
  switch (family_) {
    case NormFamily::kEuclidean: return eta.transpose().cwiseQuotient(weights_);
    case NormFamily::kL1:
    case NormFamily::kLinf:
    case NormFamily::kPolyhedral:
      throw UnsupportedError("dual energy of a polyhedral norm is not differentiable; use subdiff_dual_energy");
    case NormFamily::kCorner: {
      const AxisSplit s = split(eta.transpose(), axis_);
      Vector m = Vector::Zero(dim_);
      if (std::abs(s.a) >= s.rho) {
        if (s.a == 0.0) return m;
        m(axis_) = s.a > 0.0 ? 1.0 : -1.0;
        return std::abs(s.a) * m;
      }
      const double ratio = s.a / s.rho;
      const double rho = 0.5 * (1.0 - ratio * ratio);
      m = rho / s.rho * s.perp;
      m(axis_) = ratio;
      return (s.rho * s.rho + s.a * s.a) / (2.0 * s.rho) * m;
    }
    case NormFamily::kRootSum: {
      const double t = root_sum_threshold(eta);
      Vector g(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double excess = std::max(0.0, std::abs(eta(i)) - t);
        g(i) = eta(i) > 0.0 ? excess : -excess;
      }
      return g;
    }
  }
  throw UnsupportedError("unknown norm family");
}

int NormSpec::dual_regime(const Covector& eta) const {
  check_dim(eta.size());
  switch (family_) {
    case NormFamily::kEuclidean: return 0;
    case NormFamily::kL1:
    case NormFamily::kLinf:
    case NormFamily::kPolyhedral: return eta.isZero(0.0) ? -1 : ball_->face_of(eta).id;
    case NormFamily::kCorner: {
      const AxisSplit s = split(eta.transpose(), axis_);
      return std::abs(s.a) >= s.rho ? 0 : 1;
    }
    case NormFamily::kRootSum: {
      const double t = root_sum_threshold(eta);
      int mask = 0;
      for (int i = 0; i < dim_; ++i) {
        if (std::abs(eta(i)) > t) mask |= 1 << i;
      }
      return mask;
    }
  }
  throw UnsupportedError("unknown norm family");
}

InversionCheck NormSpec::check_duality_inversion(const Vector& u, const Covector& eta, double tol) const {
  check_dim(u.size());
  check_dim(eta.size());
  InversionCheck r;
  r.eta_in_subdiff_energy = subdiff_energy(u).contains(eta.transpose(), tol);
  r.fenchel_equality = std::abs(energy(u) + dual_energy(eta) - pairing(eta, u)) <= tol;
  r.u_in_subdiff_dual_energy = subdiff_dual_energy(eta).contains(u, tol);
  return r;
}

nlohmann::json NormSpec::to_json() const {
  nlohmann::json j;
  j["family"] = alias_.empty() ? to_string(family_) : alias_;
  j["dim"] = dim_;
  nlohmann::json params = nlohmann::json::object();
  switch (family_) {
    case NormFamily::kEuclidean: params["weights"] = coords(weights_); break;
    case NormFamily::kPolyhedral: params = ball_->to_json(); break;
    case NormFamily::kCorner:
      if (alias_.empty()) params["axis"] = axis_;
      break;
    default: break;
  }
  j["params"] = params;
  return j;
}

NormSpec NormSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family")) throw InputError("norm JSON needs a family");
  const auto family = j.at("family").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  const int dim = j.value("dim", 0);
  NormSpec n;
  if (family == "euclidean") {
    if (params.contains("weights")) {
      const auto w = params.at("weights").get<std::vector<double>>();
      n = euclidean(Vector(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()))));
    } else {
      n = euclidean(dim);
    }
  } else if (family == "l1") {
    n = l1(dim);
  } else if (family == "linf") {
    n = linf(dim);
  } else if (family == "polyhedral") {
    n = polyhedral(Polyhedron::from_json(params));
  } else if (family == "corner") {
    n = corner(dim, params.value("axis", 0));
  } else if (family == "so3") {
    if (dim != 0 && dim != 3) throw InputError("so3 norm has dimension 3");
    n = so3();
  } else if (family == "root_sum") {
    n = root_sum(dim);
  } else {
    throw UnsupportedError("unknown norm family '" + family + "'");
  }
  if (dim != 0 && dim != n.dim()) throw InputError("norm JSON dim does not match its parameters");
  return n;
}

bool operator==(const NormSpec& a, const NormSpec& b) {
  if (a.family_ != b.family_ || a.dim_ != b.dim_ || a.axis_ != b.axis_ || a.alias_ != b.alias_) return false;
  if (a.weights_.size() != b.weights_.size() || a.weights_ != b.weights_) return false;
  if (static_cast<bool>(a.ball_) != static_cast<bool>(b.ball_)) return false;
  if (a.ball_) {
    const auto& va = a.ball_->vertices();
    const auto& vb = b.ball_->vertices();
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i) {
      if (va[i] != vb[i]) return false;
    }
  }
  return true;
}

StarCovering star_covering(const NormSpec& norm) {
  if (!norm.is_polyhedral()) {
    throw UnsupportedError("star covering needs a polyhedral norm, got " + to_string(norm.family()));
  }
  return star_covering(norm.polyhedron());
}

}  // namespace subfinsler
