#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subfinsler/lie_group.hpp"
#include "subfinsler/norm.hpp"
#include "subfinsler/submetry.hpp"
#include "subfinsler/trajectory.hpp"

namespace subfinsler {

/// Upper estimate of
///   M(r) = max { N(Ad_g ad_X Y) : g in B(1, r), N(X) = N(Y) = 1 }.
struct MEstimate {
  double value = 0.0;
  std::string method;      // "abelian", "analytic" or "sampled"
  double resolution = 0.0; // radial grid step of the sampled ball
  long evaluations = 0;
  double raw_max = 0.0;    // sampled maximum before inflation
  bool approximate = false;

  nlohmann::json to_json() const;
};

struct MOptions {
  double radial_step = 0.25;
  int directions = 16;
  /// Directions used in two-piece products exp(a X) exp(b Y).
  int product_directions = 6;
  /// Unit-sphere samples for X, Y when N is not polyhedral.
  int sphere_samples = 96;
  double inflation = 0.10;
  long budget = 4'000'000;
  std::uint64_t seed = 0x5eed;
};

/// Analytic for abelian groups and for step-two groups with polyhedral N
/// (brackets are central, so Ad acts trivially and bilinearity reduces the
/// maximum to vertex pairs). Otherwise the ball B(1, r) of the sub-Finsler
/// distance of ball_norm is sampled by exp images and two-piece products on
/// the radial grid k * radial_step up to ceil(r / radial_step) * radial_step,
/// which makes the estimate nondecreasing in r; the sampled maximum is
/// inflated by the safety factor.
MEstimate M_of_r(const GroupSpec& group, const NormSpec& n, double r, const NormSpec& ball_norm,
                 const MOptions& opt = {});

/// delta / (N*(lambda) M); +infinity when M = 0.
double stability_window(double delta, const Covector& lambda, const NormSpec& n, double m);

struct WindowViolation {
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<int> faces;
};

struct StabilityCertificate {
  double delta = 0.0;
  nlohmann::json n;  // auxiliary norm on the algebra
  MEstimate m;
  Covector lambda;
  double n_star = 0.0;
  double window = 0.0;
  bool verdict = false;
  std::vector<WindowViolation> violations;

  nlohmann::json to_json() const;
};

/// Slides a window of length w over the grid. A window passes when the
/// faces at its interior grid points all lie in one facet, i.e. the control
/// takes values in one face; points exactly on the window edges belong to
/// the neighbouring windows. Reports the first violating window.
StabilityCertificate verify_face_stability(const Trajectory& traj, const Polyhedron& ball, double w);

/// Runs the full pipeline for one trajectory: delta from the star covering,
/// M(r T) for the ball reached by the curve, the window, and the check.
StabilityCertificate certify_trajectory(const GroupSpec& group, const NormSpec& norm, const NormSpec& n,
                                        const Trajectory& traj, const MOptions& opt = {});

/// Largest L (by bisection) with L M(L) <= delta, where N is the norm
/// itself; normal curves of length below it have controls in one face.
/// +infinity for abelian groups.
double finsler_short_bound(const GroupSpec& group, const NormSpec& norm, const MOptions& opt = {});

struct MinimalityVerdict {
  bool verdict = false;
  double window = 0.0;
  std::optional<WindowViolation> first_violation;

  nlohmann::json to_json() const;
};

/// Projects the controls through dpi and checks that every window of length
/// w keeps them in one face of the pushed polyhedral ball.
MinimalityVerdict abelianized_minimality(const Trajectory& traj, const SubmetryData& sub, double w);

struct ShortcutRecord {
  double epsilon = 0.0;
  double beta = 0.0;
  double length = 0.0;
  double normal_length = 0.0;  // length of exp(t X3), t in [0, epsilon]
  Matrix endpoint;
  Matrix target;
  double endpoint_error = 0.0;
  std::vector<std::array<double, 2>> planar_corners;
  double enclosed_area = 0.0;
  Trajectory curve;

  nlohmann::json to_json() const;
};

/// Four-piece curve with controls X1+X3, X2+X3, -X1+X3, -X2+X3 on intervals
/// of length beta, 4 beta + beta^2 = epsilon, reaching exp(epsilon X3) with
/// length 4 beta < epsilon for the L-infinity norm.
ShortcutRecord heisenberg_shortcut(double epsilon, int samples_per_piece = 100);

}  // namespace subfinsler
