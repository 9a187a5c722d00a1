#include "subfinsler/trajectory.hpp"

#include <cstdio>
#include <ostream>

namespace subfinsler {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Trajectory::write_csv(std::ostream& os) const {
  const Eigen::Index n = g.empty() ? 0 : g.front().matrix().rows();
  const Eigen::Index m = u.empty() ? 0 : u.front().size();
  const Eigen::Index k = xi.empty() ? 0 : xi.front().size();
  os << "t";
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) os << ",g" << r << c;
  }
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i;
  for (Eigen::Index i = 0; i < k; ++i) os << ",xi" << i;
  os << ",face_id\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << format_double(t[i]);
    const Matrix& a = g[i].matrix();
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) os << ',' << format_double(a(r, c));
    }
    for (Eigen::Index j = 0; j < m; ++j) os << ',' << format_double(u[i](j));
    for (Eigen::Index j = 0; j < k; ++j) os << ',' << format_double(xi[i](j));
    os << ',' << (i < face.size() ? face[i] : -1) << '\n';
  }
}

nlohmann::json Trajectory::metadata() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back({{"t", e.t}, {"from_face", e.from_face}, {"to_face", e.to_face}});
  return {{"group", group},
          {"norm", norm},
          {"lambda", std::vector<double>(lambda.data(), lambda.data() + lambda.size())},
          {"h", h},
          {"speed", speed},
          {"rule", rule},
          {"samples", t.size()},
          {"events", ev}};
}

nlohmann::json BranchReport::to_json() const {
  nlohmann::json j{{"horizon", horizon},
                   {"agree_tol", agree_tol},
                   {"split_tol", split_tol},
                   {"coincidence_time", coincidence},
                   {"max_separation", max_separation},
                   {"branching", has_witness}};
  if (has_witness) {
    j["witness"] = {{"t", witness_time}, {"separation", witness_separation}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace subfinsler
