#pragma once

#include <optional>
#include <string>

#include "subfinsler/lie_group.hpp"
#include "subfinsler/norm.hpp"
#include "subfinsler/trajectory.hpp"

namespace subfinsler {

/// How the polyhedral integrator picks a control from a set-valued face.
enum class SelectionRule {
  kPersistent,  // keep the previous control while it stays admissible
  kBarycenter,
  kVertexMin,   // lowest-index vertex of the face
};

std::string to_string(SelectionRule r);
SelectionRule selection_rule_from_string(const std::string& s);

struct FlowOptions {
  double horizon = 1.0;
  double h = 1e-3;
  SelectionRule rule = SelectionRule::kPersistent;
  /// Control at t = 0 (coordinates in V); must lie in the initial face.
  std::optional<Vector> start_control;
  /// Event localization resolution, as a fraction of h.
  double event_resolution = 1e-3;
  int max_switches = 100000;
};

/// Y -> lambda(Ad_g [u, Y]) on V: the derivative of the dual curve.
Covector dual_derivative(const GroupSpec& group, const Covector& lambda, const GroupElement& g, const Vector& u);

/// Fourth-order commutator-free Lie group scheme on gamma' = gamma u,
/// u = dE*(xi(gamma)); stage points stay on the group. Steps that cross a
/// change of dual_regime are split at the bisected switch time.
Trajectory integrate_smooth(const GroupSpec& group, const NormSpec& norm, const Covector& lambda,
                            const GroupElement& g0, const FlowOptions& opt);

/// Event-driven integration of the normal inclusion for polyhedral norms,
/// advancing with exact exponentials of the selected control.
Trajectory integrate_polyhedral(const GroupSpec& group, const NormSpec& norm, const Covector& lambda,
                                const GroupElement& g0, const FlowOptions& opt);

/// Dispatches on the convexity class of the norm.
Trajectory integrate(const GroupSpec& group, const NormSpec& norm, const Covector& lambda, const GroupElement& g0,
                     const FlowOptions& opt);

/// g0 exp(t v) sampled on the grid of step h up to the horizon, v in V.
Trajectory one_parameter_trajectory(const GroupSpec& group, const Vector& v, const GroupElement& g0, double horizon,
                                    double h);

BranchReport detect_branching(const Trajectory& a, const Trajectory& b, double agree_tol = 1e-6,
                              double split_tol = 1e-3);

/// max_i | ||u(t_i)|| - ||xi(0)||_* |.
double check_constant_speed(const Trajectory& traj, const NormSpec& norm);
/// max_i | ||xi(t_i)||_* - ||xi(0)||_* |.
double dual_sphere_deviation(const Trajectory& traj, const NormSpec& norm);

}  // namespace subfinsler
