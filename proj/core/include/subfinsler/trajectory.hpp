#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subfinsler/errors.hpp"
#include "subfinsler/lie_group.hpp"
#include "subfinsler/types.hpp"

namespace subfinsler {

/// Sampled normal curve on a uniform grid.
struct Trajectory {
  std::string group;
  nlohmann::json norm;  // serialized NormSpec
  Covector lambda;
  double h = 0.0;
  double speed = 0.0;  // ||xi(0)||_*
  std::string rule;    // selection rule, or "smooth"

  std::vector<double> t;
  std::vector<GroupElement> g;
  std::vector<Vector> u;
  std::vector<Covector> xi;
  std::vector<int> face;  // -1 on the smooth path
  /// Face switches (polyhedral path) or regime switches (smooth path).
  std::vector<FaceEvent> events;

  std::size_t size() const noexcept { return t.size(); }

  /// Header, then t, chart entries row-major, u, xi, face_id per grid point.
  void write_csv(std::ostream& os) const;
  nlohmann::json metadata() const;
};

struct BranchReport {
  double horizon = 0.0;
  double agree_tol = 0.0;
  double split_tol = 0.0;
  /// Last grid time up to which the curves stay within agree_tol.
  double coincidence = 0.0;
  bool has_witness = false;
  double witness_time = 0.0;
  double witness_separation = 0.0;
  double max_separation = 0.0;

  nlohmann::json to_json() const;
};

/// %.17g formatting shared by every text output.
std::string format_double(double x);

}  // namespace subfinsler
