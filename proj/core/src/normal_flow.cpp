#include "subfinsler/normal_flow.hpp"

#include <algorithm>
#include <cmath>

#include "subfinsler/errors.hpp"

namespace subfinsler {
namespace {

int grid_steps(const FlowOptions& opt) {
  if (!(opt.h > 0.0) || !std::isfinite(opt.h)) throw InputError("step h must be positive");
  if (!(opt.horizon >= 0.0) || !std::isfinite(opt.horizon)) throw InputError("horizon must be nonnegative");
  if (!(opt.event_resolution > 0.0 && opt.event_resolution < 1.0)) {
    throw InputError("event resolution must lie in (0, 1)");
  }
  return static_cast<int>(std::ceil(opt.horizon / opt.h - 1e-9));
}

void check_setup(const GroupSpec& group, const NormSpec& norm, const Covector& lambda, const GroupElement& g0) {
  if (norm.dim() != group.rank()) throw InputError("norm dimension does not match the polarization");
  if (lambda.size() != group.dim()) throw InputError("covector dimension does not match the algebra");
  if (!lambda.allFinite()) throw InputError("covector has non-finite entries");
  if (!group.on_group(g0.matrix())) throw InputError("start point does not lie on the group");
}

Trajectory make_header(const GroupSpec& group, const NormSpec& norm, const Covector& lambda, const FlowOptions& opt) {
  Trajectory tr;
  tr.group = group.name();
  tr.norm = norm.to_json();
  tr.lambda = lambda;
  tr.h = opt.h;
  return tr;
}

}  // namespace

std::string to_string(SelectionRule r) {
  switch (r) {
    case SelectionRule::kPersistent: return "persistent";
    case SelectionRule::kBarycenter: return "barycenter";
    case SelectionRule::kVertexMin: return "vertex_min";
  }
  return "unknown";
}

SelectionRule selection_rule_from_string(const std::string& s) {
  if (s == "persistent") return SelectionRule::kPersistent;
  if (s == "barycenter") return SelectionRule::kBarycenter;
  if (s == "vertex_min") return SelectionRule::kVertexMin;
  throw InputError("unknown selection rule '" + s + "'");
}

Covector dual_derivative(const GroupSpec& group, const Covector& lambda, const GroupElement& g, const Vector& u) {
  if (lambda.size() != group.dim()) throw InputError("covector dimension does not match the algebra");
  const Vector x = group.embed(u);
  const Matrix ad_u = group.ad_operator(x);
  const Matrix ad_g = group.Ad_operator(g);
  const Covector full = lambda * ad_g * ad_u;
  return group.restrict(full);
}

Trajectory integrate_smooth(const GroupSpec& group, const NormSpec& norm, const Covector& lambda,
                            const GroupElement& g0, const FlowOptions& opt) {
  check_setup(group, norm, lambda, g0);
  if (norm.is_polyhedral()) throw InputError("smooth integrator needs a strictly convex norm");
  const int steps = grid_steps(opt);

  double now = 0.0;
  auto xi_of = [&](const Matrix& m) { return group.coadjoint_dual_point(lambda, GroupElement(group.name(), m)); };
  auto control = [&](const Covector& xi) {
    Vector u;
    try {
      u = norm.dual_gradient(xi);
    } catch (const std::exception& e) {
      throw IntegrationError(std::string("dual gradient undefined: ") + e.what(), now);
    }
    if (!u.allFinite()) throw IntegrationError("dual gradient is not finite", now);
    return u;
  };
  // Fourth-order commutator-free Lie group scheme: every stage is g times
  // exponentials, so stages stay on the group (classical RK4 stages leave
  // compact groups and break the algebra pullback).
  auto field = [&](const Matrix& m) -> Vector { return group.embed(control(xi_of(m))); };
  auto step_exp = [&](const Matrix& m, const Vector& x) -> Matrix { return m * group.exp(x).matrix(); };
  auto rk4 = [&](const Matrix& m, double dt) -> Matrix {
    const Vector f1 = field(m);
    const Matrix y2 = step_exp(m, 0.5 * dt * f1);
    const Vector f2 = field(y2);
    const Vector f3 = field(step_exp(m, 0.5 * dt * f2));
    const Vector f4 = field(step_exp(y2, dt * (f3 - 0.5 * f1)));
    const Vector c1 = dt * (f1 / 4.0 + f2 / 6.0 + f3 / 6.0 - f4 / 12.0);
    const Vector c2 = dt * (-f1 / 12.0 + f2 / 6.0 + f3 / 6.0 + f4 / 4.0);
    return step_exp(step_exp(m, c1), c2);
  };
  auto regime = [&](const Matrix& m) { return norm.dual_regime(xi_of(m)); };

  Trajectory tr = make_header(group, norm, lambda, opt);
  tr.rule = "smooth";
  Matrix g = g0.matrix();
  auto record = [&](double t) {
    const Covector xi = xi_of(g);
    tr.t.push_back(t);
    tr.g.emplace_back(group.name(), g);
    tr.xi.push_back(xi);
    tr.u.push_back(control(xi));
    tr.face.push_back(-1);
  };
  record(0.0);
  tr.speed = norm.dual_norm(tr.xi.front());

  const double resolution = opt.h * opt.event_resolution;
  for (int i = 0; i < steps; ++i) {
    now = i * opt.h;
    const int r0 = regime(g);
    Matrix next = rk4(g, opt.h);
    if (regime(next) != r0) {
      double lo = 0.0;
      double hi = opt.h;
      while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (regime(rk4(g, mid)) == r0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const Matrix at_switch = rk4(g, hi);
      tr.events.push_back({now + hi, r0, regime(at_switch)});
      next = rk4(at_switch, opt.h - hi);
    }
    if (!next.allFinite()) throw IntegrationError("state became non-finite", now, tr.events);
    g = next;
    record((i + 1) * opt.h);
  }
  return tr;
}

Trajectory integrate_polyhedral(const GroupSpec& group, const NormSpec& norm, const Covector& lambda,
                                const GroupElement& g0, const FlowOptions& opt) {
  check_setup(group, norm, lambda, g0);
  const Polyhedron& ball = norm.polyhedron();
  const int steps = grid_steps(opt);

  auto xi_of = [&](const Matrix& m) { return group.coadjoint_dual_point(lambda, GroupElement(group.name(), m)); };
  auto flow = [&](const Matrix& m, const Vector& u, double dt) -> Matrix {
    return m * group.exp(group.embed(dt * u)).matrix();
  };
  auto face_at = [&](const Matrix& m) -> const Face& { return ball.face_of(xi_of(m)); };

  const Covector xi0 = xi_of(g0.matrix());
  const double r = norm.dual_norm(xi0);
  if (!(r > 0.0)) throw InputError("covector vanishes on the polarization; no normal curve data");

  auto admissible = [&](const Vector& u, const Face& f) {
    const auto& inner = ball.face_containing(u).vertices;
    return std::includes(f.vertices.begin(), f.vertices.end(), inner.begin(), inner.end());
  };
  auto barycenter = [&](const Face& f) {
    Vector b = Vector::Zero(norm.dim());
    for (int i : f.vertices) b += ball.vertices()[static_cast<std::size_t>(i)];
    return Vector(r * b / static_cast<double>(f.vertices.size()));
  };
  auto vertex_min = [&](const Face& f) {
    return Vector(r * ball.vertices()[static_cast<std::size_t>(f.vertices.front())]);
  };
  const double probe = opt.h * opt.event_resolution;
  auto select = [&](const Matrix& m, const Face& f, const std::optional<Vector>& previous) {
    Vector preferred;
    switch (opt.rule) {
      case SelectionRule::kPersistent:
        preferred = previous && admissible(*previous, f) ? *previous : barycenter(f);
        break;
      case SelectionRule::kBarycenter: preferred = barycenter(f); break;
      case SelectionRule::kVertexMin: preferred = vertex_min(f); break;
    }
    if (f.vertices.size() == 1) return preferred;
    // Set-valued face: keep the first candidate that stays admissible for a
    // short probe step, so the selection does not leave the face at once.
    std::vector<Vector> candidates{preferred, barycenter(f)};
    for (int i : f.vertices) candidates.push_back(r * ball.vertices()[static_cast<std::size_t>(i)]);
    for (const auto& c : candidates) {
      if (admissible(c, face_at(flow(m, c, probe)))) return c;
    }
    return preferred;
  };

  Trajectory tr = make_header(group, norm, lambda, opt);
  tr.rule = to_string(opt.rule);
  tr.speed = r;

  Matrix g = g0.matrix();
  const Face* face = &face_at(g);
  Vector u;
  if (opt.start_control) {
    if (opt.start_control->size() != norm.dim()) throw InputError("start control dimension mismatch");
    if (!norm.subdiff_dual_energy(xi0).contains(*opt.start_control)) {
      throw InputError("start control is not in the initial face");
    }
    u = *opt.start_control;
  } else if (opt.rule == SelectionRule::kVertexMin) {
    u = vertex_min(*face);
  } else {
    u = select(g, *face, std::nullopt);
  }

  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.g.emplace_back(group.name(), g);
    tr.xi.push_back(xi_of(g));
    tr.u.push_back(u);
    tr.face.push_back(face->id);
  };
  record(0.0);

  const double resolution = opt.h * opt.event_resolution;
  int switches = 0;
  for (int i = 0; i < steps; ++i) {
    double t = i * opt.h;
    double remaining = opt.h;
    while (remaining > 0.0) {
      const Matrix trial = flow(g, u, remaining);
      const Face& f_end = face_at(trial);
      if (f_end.id == face->id) {
        g = trial;
        break;
      }
      double lo = 0.0;
      double hi = remaining;
      while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        if (face_at(flow(g, u, mid)).id == face->id) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      g = flow(g, u, hi);
      t += hi;
      remaining -= hi;
      const Face& f_new = face_at(g);
      tr.events.push_back({t, face->id, f_new.id});
      if (++switches > opt.max_switches) {
        throw IntegrationError("face thrashing: more than " + std::to_string(opt.max_switches) + " switches", t,
                               tr.events);
      }
      face = &f_new;
      u = select(g, *face, u);
    }
    if (!g.allFinite()) throw IntegrationError("state became non-finite", t, tr.events);
    // Grid faces are read from the dual point itself.
    face = &face_at(g);
    if (!admissible(u, *face)) u = select(g, *face, u);
    record((i + 1) * opt.h);
  }
  return tr;
}

Trajectory integrate(const GroupSpec& group, const NormSpec& norm, const Covector& lambda, const GroupElement& g0,
                     const FlowOptions& opt) {
  if (norm.is_polyhedral()) return integrate_polyhedral(group, norm, lambda, g0, opt);
  return integrate_smooth(group, norm, lambda, g0, opt);
}

Trajectory one_parameter_trajectory(const GroupSpec& group, const Vector& v, const GroupElement& g0, double horizon,
                                    double h) {
  FlowOptions opt;
  opt.horizon = horizon;
  opt.h = h;
  const int steps = grid_steps(opt);
  Trajectory tr;
  tr.group = group.name();
  tr.h = h;
  tr.rule = "one_parameter";
  tr.lambda = Covector::Zero(group.dim());
  const Vector x = group.embed(v);
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    tr.t.push_back(t);
    tr.g.push_back(g0 * group.exp(t * x));
    tr.u.push_back(v);
    tr.face.push_back(-1);
  }
  return tr;
}

BranchReport detect_branching(const Trajectory& a, const Trajectory& b, double agree_tol, double split_tol) {
  if (a.size() != b.size() || a.size() == 0) throw InputError("trajectories are on different grids");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.t[i] - b.t[i]) > 1e-9 * std::max(1.0, std::abs(a.t[i]))) {
      throw InputError("trajectories are on different grids");
    }
  }
  if (chart_distance(a.g.front(), b.g.front()) > agree_tol) throw InputError("trajectories start at different points");

  BranchReport rep;
  rep.horizon = a.t.back();
  rep.agree_tol = agree_tol;
  rep.split_tol = split_tol;
  double running = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = chart_distance(a.g[i], b.g[i]);
    running = std::max(running, d);
    if (running <= agree_tol) rep.coincidence = a.t[i];
    if (!rep.has_witness && d >= split_tol) {
      rep.has_witness = true;
      rep.witness_time = a.t[i];
      rep.witness_separation = d;
    }
  }
  rep.max_separation = running;
  return rep;
}

double check_constant_speed(const Trajectory& traj, const NormSpec& norm) {
  double worst = 0.0;
  for (const auto& u : traj.u) worst = std::max(worst, std::abs(norm.norm(u) - traj.speed));
  return worst;
}

double dual_sphere_deviation(const Trajectory& traj, const NormSpec& norm) {
  double worst = 0.0;
  for (const auto& xi : traj.xi) worst = std::max(worst, std::abs(norm.dual_norm(xi) - traj.speed));
  return worst;
}

}  // namespace subfinsler
