#include "subfinsler/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "subfinsler/errors.hpp"
#include "subfinsler/normal_flow.hpp"

namespace subfinsler {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json violation_json(const WindowViolation& v) {
  return {{"t_start", v.t_start}, {"t_end", v.t_end}, {"faces", v.faces}};
}

Vector random_unit(std::mt19937_64& rng, const NormSpec& norm) {
  std::normal_distribution<double> gauss;
  Vector v(norm.dim());
  do {
    for (int i = 0; i < norm.dim(); ++i) v(i) = gauss(rng);
  } while (v.norm() < 1e-6);
  return v / norm.norm(v);
}

// First run of consecutive grid points spanning less than w whose faces do
// not lie in a common facet of the ball.
std::optional<WindowViolation> first_violation(const std::vector<double>& t, const std::vector<int>& faces,
                                               const Polyhedron& ball, double w) {
  std::vector<int> facets;
  for (const auto& f : ball.faces()) {
    if (f.dim == ball.dim() - 1) facets.push_back(f.id);
  }
  std::vector<std::vector<int>> containing(ball.faces().size());
  for (const auto& f : ball.faces()) {
    for (std::size_t k = 0; k < facets.size(); ++k) {
      const auto& big = ball.face(facets[k]).vertices;
      if (std::includes(big.begin(), big.end(), f.vertices.begin(), f.vertices.end())) {
        containing[static_cast<std::size_t>(f.id)].push_back(static_cast<int>(k));
      }
    }
  }

  std::vector<int> count(facets.size(), 0);
  auto add = [&](std::size_t i, int delta) {
    for (int k : containing[static_cast<std::size_t>(faces[i])]) count[static_cast<std::size_t>(k)] += delta;
  };
  const std::size_t n = t.size();
  std::size_t b = 0;  // window is [a, b)
  for (std::size_t a = 0; a < n; ++a) {
    if (b < a + 1) {
      b = a + 1;
      add(a, 1);
    }
    while (b < n && t[b] - t[a] < w) add(b++, 1);
    const int size = static_cast<int>(b - a);
    if (std::none_of(count.begin(), count.end(), [&](int c) { return c == size; })) {
      WindowViolation v;
      v.t_start = t[a];
      v.t_end = t[b - 1];
      std::set<int> distinct(faces.begin() + static_cast<std::ptrdiff_t>(a), faces.begin() + static_cast<std::ptrdiff_t>(b));
      v.faces.assign(distinct.begin(), distinct.end());
      return v;
    }
    add(a, -1);
  }
  return std::nullopt;
}

}  // namespace

nlohmann::json MEstimate::to_json() const {
  return {{"value", value},       {"method", method},     {"resolution", resolution},
          {"evaluations", evaluations}, {"raw_max", raw_max}, {"approximate", approximate}};
}

MEstimate M_of_r(const GroupSpec& group, const NormSpec& n, double r, const NormSpec& ball_norm, const MOptions& opt) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InputError("radius must be finite and nonnegative");
  if (n.dim() != group.dim()) throw InputError("auxiliary norm must live on the whole algebra");
  if (ball_norm.dim() != group.rank()) throw InputError("ball norm must live on the polarization");

  MEstimate est;
  if (group.is_abelian()) {
    est.method = "abelian";
    return est;
  }

  std::mt19937_64 rng(opt.seed);
  std::vector<Vector> unit;
  if (n.is_polyhedral()) {
    unit = n.polyhedron().vertices();
  } else {
    for (int i = 0; i < group.dim(); ++i) unit.push_back(Vector::Unit(group.dim(), i) / n.norm(Vector::Unit(group.dim(), i)));
    for (int s = 0; s < opt.sphere_samples; ++s) unit.push_back(random_unit(rng, n));
  }
  std::vector<Vector> brackets;
  for (const auto& x : unit) {
    for (const auto& y : unit) {
      Vector b = group.ad(x, y);
      if (!b.isZero(0.0)) brackets.push_back(std::move(b));
    }
  }

  if (group.is_step_two() && n.is_polyhedral()) {
    for (const auto& b : brackets) est.raw_max = std::max(est.raw_max, n.norm(b));
    est.value = est.raw_max;
    est.method = "analytic";
    est.evaluations = static_cast<long>(brackets.size());
    return est;
  }

  if (!(opt.radial_step > 0.0)) throw InputError("radial step must be positive");
  std::vector<Vector> dirs;
  for (int i = 0; i < opt.directions; ++i) dirs.push_back(group.embed(random_unit(rng, ball_norm)));
  const long steps = r == 0.0 ? 0 : static_cast<long>(std::ceil(r / opt.radial_step - 1e-12));
  est.method = "sampled";
  est.resolution = opt.radial_step;

  bool stop = false;
  auto visit = [&](const GroupElement& g) {
    if (stop) return;
    const Matrix ad_g = group.Ad_operator(g);
    for (const auto& b : brackets) est.raw_max = std::max(est.raw_max, n.norm(ad_g * b));
    est.evaluations += static_cast<long>(brackets.size());
    if (est.evaluations > opt.budget) {
      est.approximate = true;
      stop = true;
    }
  };
  visit(group.identity());
  for (long k = 1; k <= steps && !stop; ++k) {
    for (const auto& d : dirs) visit(group.exp(static_cast<double>(k) * opt.radial_step * d));
  }
  const auto np = static_cast<std::size_t>(std::min(opt.product_directions, opt.directions));
  for (long a = 1; a < steps && !stop; ++a) {
    for (long b = 1; a + b <= steps && !stop; ++b) {
      for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = 0; j < np; ++j) {
          if (i == j) continue;
          visit(group.exp(static_cast<double>(a) * opt.radial_step * dirs[i]) *
                group.exp(static_cast<double>(b) * opt.radial_step * dirs[j]));
        }
      }
    }
  }
  est.value = est.raw_max * (1.0 + opt.inflation);
  return est;
}

double stability_window(double delta, const Covector& lambda, const NormSpec& n, double m) {
  if (!(delta > 0.0)) throw InputError("Lebesgue bound must be positive");
  if (m < 0.0) throw InputError("M must be nonnegative");
  const double n_star = n.dual_norm(lambda);
  if (!(n_star > 0.0)) throw InputError("zero covector carries no normal curve data");
  if (m == 0.0) return kInf;
  return delta / (n_star * m);
}

nlohmann::json StabilityCertificate::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations) v.push_back(violation_json(x));
  return {{"delta", delta},
          {"N", n},
          {"M", m.to_json()},
          {"lambda", std::vector<double>(lambda.data(), lambda.data() + lambda.size())},
          {"n_star", n_star},
          {"window", finite_or_null(window)},
          {"window_infinite", !std::isfinite(window)},
          {"verdict", verdict},
          {"violations", v}};
}

StabilityCertificate verify_face_stability(const Trajectory& traj, const Polyhedron& ball, double w) {
  if (!(w > 0.0)) throw InputError("window length must be positive");
  if (traj.face.size() != traj.size() || traj.size() == 0) throw InputError("trajectory has no face record");
  for (int f : traj.face) {
    if (f < 0 || f >= static_cast<int>(ball.faces().size())) throw InputError("trajectory face ids do not match the ball");
  }
  StabilityCertificate cert;
  cert.window = w;
  cert.lambda = traj.lambda;
  if (auto v = first_violation(traj.t, traj.face, ball, w)) cert.violations.push_back(*v);
  cert.verdict = cert.violations.empty();
  return cert;
}

StabilityCertificate certify_trajectory(const GroupSpec& group, const NormSpec& norm, const NormSpec& n,
                                        const Trajectory& traj, const MOptions& opt) {
  if (traj.size() == 0) throw InputError("empty trajectory");
  const StarCovering cover = star_covering(norm);
  // Left translation to the identity turns lambda into lambda o Ad_{g0}.
  const Covector lambda = traj.lambda * group.Ad_operator(traj.g.front());
  const double reach = traj.speed * (traj.t.back() - traj.t.front());
  const MEstimate m = M_of_r(group, n, reach, norm, opt);
  const double w = stability_window(cover.delta, lambda, n, m.value);
  StabilityCertificate cert = verify_face_stability(traj, norm.polyhedron(), w);
  cert.delta = cover.delta;
  cert.n = n.to_json();
  cert.m = m;
  cert.lambda = lambda;
  cert.n_star = n.dual_norm(lambda);
  return cert;
}

double finsler_short_bound(const GroupSpec& group, const NormSpec& norm, const MOptions& opt) {
  if (!group.is_finsler()) throw InputError("short-length bound needs a Finsler polarization");
  if (!norm.is_polyhedral()) throw UnsupportedError("short-length bound needs a polyhedral norm");
  if (group.is_abelian()) return kInf;
  const double delta = star_covering(norm).delta;
  auto m_at = [&](double l) { return M_of_r(group, norm, l, norm, opt).value; };
  auto ok = [&](double l) { return l * m_at(l) <= delta; };
  const double hi0 = delta / m_at(0.0);
  if (ok(hi0)) return hi0;
  double lo = 0.0;
  double hi = hi0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

nlohmann::json MinimalityVerdict::to_json() const {
  nlohmann::json j{{"verdict", verdict}, {"window", finite_or_null(window)}, {"window_infinite", !std::isfinite(window)}};
  j["first_violation"] = first_violation ? violation_json(*first_violation) : nlohmann::json(nullptr);
  return j;
}

MinimalityVerdict abelianized_minimality(const Trajectory& traj, const SubmetryData& sub, double w) {
  if (!(w > 0.0)) throw InputError("window length must be positive");
  if (!sub.pushed_polyhedral()) throw UnsupportedError("projected face check needs a polyhedral pushed norm");
  if (traj.group != sub.source().name()) throw InputError("trajectory does not live on the submetry source");
  const Polyhedron& ball = sub.pushed_polyhedral()->polyhedron();
  std::vector<int> faces;
  for (const auto& u : traj.u) {
    const Vector w_ctrl = sub.differential_on_polarization() * u;
    if (w_ctrl.isZero(0.0)) throw InputError("projected control vanishes");
    faces.push_back(ball.face_containing(w_ctrl).id);
  }
  MinimalityVerdict out;
  out.window = w;
  out.first_violation = first_violation(traj.t, faces, ball, w);
  out.verdict = !out.first_violation;
  return out;
}

nlohmann::json ShortcutRecord::to_json() const {
  nlohmann::json corners = nlohmann::json::array();
  for (const auto& c : planar_corners) corners.push_back({c[0], c[1]});
  return {{"epsilon", epsilon},
          {"beta", beta},
          {"length", length},
          {"normal_length", normal_length},
          {"shorter", length < normal_length},
          {"endpoint", matrix_json(endpoint)},
          {"target", matrix_json(target)},
          {"endpoint_error", endpoint_error},
          {"planar_corners", corners},
          {"enclosed_area", enclosed_area}};
}

ShortcutRecord heisenberg_shortcut(double epsilon, int samples_per_piece) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive");
  if (samples_per_piece < 1) throw InputError("need at least one sample per piece");
  const GroupSpec group = GroupSpec::heisenberg();
  const NormSpec norm = NormSpec::linf(3);

  ShortcutRecord rec;
  rec.epsilon = epsilon;
  // Positive root of b^2 + 4b - epsilon, in a cancellation-free form.
  rec.beta = epsilon / (2.0 + std::sqrt(4.0 + epsilon));
  rec.normal_length = epsilon;

  const std::array<Vector, 4> controls{Vector((Vector(3) << 1, 0, 1).finished()),
                                       Vector((Vector(3) << 0, 1, 1).finished()),
                                       Vector((Vector(3) << -1, 0, 1).finished()),
                                       Vector((Vector(3) << 0, -1, 1).finished())};
  Trajectory& tr = rec.curve;
  tr.group = group.name();
  tr.norm = norm.to_json();
  tr.lambda = Covector::Zero(3);
  tr.h = rec.beta / samples_per_piece;
  tr.rule = "shortcut";
  tr.speed = 1.0;

  GroupElement g = group.identity();
  rec.planar_corners.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < controls.size(); ++k) {
    const Vector& c = controls[k];
    for (int j = 0; j < samples_per_piece; ++j) {
      tr.t.push_back(static_cast<double>(static_cast<int>(k) * samples_per_piece + j) * tr.h);
      tr.g.push_back(g * group.exp(j * tr.h * c));
      tr.u.push_back(c);
      tr.face.push_back(-1);
    }
    g = g * group.exp(rec.beta * c);
    rec.length += rec.beta * norm.norm(c);
    rec.planar_corners.push_back({g.matrix()(0, 1), g.matrix()(1, 2)});
  }
  tr.t.push_back(4.0 * rec.beta);
  tr.g.push_back(g);
  tr.u.push_back(controls.back());
  tr.face.push_back(-1);

  rec.endpoint = g.matrix();
  rec.target = group.exp(Vector::Unit(3, 2) * epsilon).matrix();
  rec.endpoint_error = (rec.endpoint - rec.target).norm();
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < rec.planar_corners.size(); ++i) {
    const auto& p = rec.planar_corners[i];
    const auto& q = rec.planar_corners[i + 1];
    area += p[0] * q[1] - q[0] * p[1];
  }
  rec.enclosed_area = 0.5 * std::abs(area);
  return rec;
}

}  // namespace subfinsler
