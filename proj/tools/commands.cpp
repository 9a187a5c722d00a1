#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "subfinsler/certify.hpp"
#include "subfinsler/normal_flow.hpp"
#include "subfinsler/submetry.hpp"

namespace subfinsler::tools {
namespace fs = std::filesystem;
namespace {

Vector to_vector(const std::vector<double>& c) {
  return Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
}

Covector to_covector(const std::vector<double>& c) { return to_vector(c).transpose(); }

std::vector<double> coords(const Covector& c) { return {c.data(), c.data() + c.size()}; }

struct Setup {
  GroupSpec group;
  NormSpec norm;
  GroupElement g0;
  FlowOptions flow;
};

Setup make_setup(const ScenarioConfig& cfg) {
  GroupSpec group = GroupSpec::from_json(cfg.group);
  NormSpec norm = NormSpec::from_json(cfg.norm);
  if (norm.dim() != group.rank()) {
    throw ConfigError("norm dimension " + std::to_string(norm.dim()) + " does not match polarization rank " +
                      std::to_string(group.rank()));
  }
  GroupElement g0 = group.identity();
  if (cfg.start) {
    if (static_cast<int>(cfg.start->size()) != group.dim()) throw ConfigError("start has the wrong dimension");
    g0 = group.exp(to_vector(*cfg.start));
  }
  FlowOptions flow;
  flow.horizon = cfg.horizon;
  flow.h = cfg.step;
  flow.event_resolution = cfg.event_resolution;
  flow.max_switches = cfg.max_switches;
  try {
    flow.rule = selection_rule_from_string(cfg.rule);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (cfg.start_control) {
    if (static_cast<int>(cfg.start_control->size()) != group.rank()) {
      throw ConfigError("start_control has the wrong dimension");
    }
    flow.start_control = to_vector(*cfg.start_control);
  }
  for (const auto& c : cfg.covectors) {
    if (static_cast<int>(c.size()) != group.dim()) throw ConfigError("covector has the wrong dimension");
  }
  return {std::move(group), std::move(norm), std::move(g0), std::move(flow)};
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  traj.write_csv(os);
}

nlohmann::json invariants(const Trajectory& traj, const NormSpec& norm) {
  return {{"speed_deviation", check_constant_speed(traj, norm)},
          {"dual_sphere_deviation", dual_sphere_deviation(traj, norm)},
          {"tolerance", 10.0 * traj.h}};
}

std::string indexed(const ScenarioConfig& cfg, std::size_t k, std::size_t count, const std::string& ext) {
  return count == 1 ? cfg.name + ext : cfg.name + "_" + std::to_string(k) + ext;
}

/// Covectors with N*(lambda) = 1 drawn from a seeded Gaussian.
std::vector<Covector> random_covectors(int count, const NormSpec& n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Covector> out;
  while (static_cast<int>(out.size()) < count) {
    Covector c(dim);
    for (int i = 0; i < dim; ++i) c(i) = gauss(rng);
    const double s = n.dual_norm(c);
    if (s < 1e-6) continue;
    out.push_back(c / s);
  }
  return out;
}

}  // namespace

CommandResult cmd_integrate(const ScenarioConfig& cfg, const fs::path& out) {
  Setup s = make_setup(cfg);
  CommandResult res;
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t k = 0; k < cfg.covectors.size(); ++k) {
    const Trajectory traj = integrate(s.group, s.norm, to_covector(cfg.covectors[k]), s.g0, s.flow);
    const fs::path csv = out / indexed(cfg, k, cfg.covectors.size(), ".csv");
    write_trajectory(csv, traj);
    res.files.push_back(csv);
    runs.push_back({{"file", csv.filename().string()},
                    {"metadata", traj.metadata()},
                    {"invariants", invariants(traj, s.norm)}});
  }
  const fs::path meta = out / (cfg.name + ".json");
  write_json(meta, {{"config", cfg.to_json()}, {"trajectories", runs}});
  res.files.push_back(meta);
  res.summary = {{"command", "integrate"}, {"trajectories", runs.size()}};
  for (const auto& r : runs) res.summary["invariants"].push_back(r.at("invariants"));
  return res;
}

CommandResult cmd_branch(const ScenarioConfig& cfg, const fs::path& out) {
  Setup s = make_setup(cfg);
  CommandResult res;
  std::vector<Trajectory> trajs;
  for (std::size_t k = 0; k < cfg.covectors.size(); ++k) {
    trajs.push_back(integrate(s.group, s.norm, to_covector(cfg.covectors[k]), s.g0, s.flow));
    const fs::path csv = out / (cfg.name + "_" + std::to_string(k) + ".csv");
    write_trajectory(csv, trajs.back());
    res.files.push_back(csv);
  }
  nlohmann::json report{{"config", cfg.to_json()}};
  if (trajs.size() >= 2) {
    report["pair"] = detect_branching(trajs[0], trajs[1], cfg.agree_tol, cfg.split_tol).to_json();
  }
  if (cfg.reference_control) {
    if (static_cast<int>(cfg.reference_control->size()) != s.group.rank()) {
      throw ConfigError("reference_control has the wrong dimension");
    }
    const Trajectory ref =
        one_parameter_trajectory(s.group, to_vector(*cfg.reference_control), s.g0, cfg.horizon, cfg.step);
    const fs::path csv = out / (cfg.name + "_reference.csv");
    write_trajectory(csv, ref);
    res.files.push_back(csv);
    nlohmann::json refs = nlohmann::json::array();
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      nlohmann::json r = detect_branching(trajs[k], ref, cfg.agree_tol, cfg.split_tol).to_json();
      r["covector"] = k;
      refs.push_back(r);
    }
    report["reference"] = refs;
  }
  nlohmann::json inv = nlohmann::json::array();
  for (const auto& t : trajs) inv.push_back(invariants(t, s.norm));
  report["invariants"] = inv;
  const fs::path path = out / (cfg.name + "_report.json");
  write_json(path, report);
  res.files.push_back(path);
  res.summary = {{"command", "branch"}};
  if (report.contains("pair")) res.summary["pair"] = report["pair"];
  if (report.contains("reference")) res.summary["reference"] = report["reference"];
  return res;
}

CommandResult cmd_certify(const ScenarioConfig& cfg, const fs::path& out) {
  Setup s = make_setup(cfg);
  if (!s.norm.is_polyhedral()) throw ConfigError("certify needs a polyhedral norm");
  const NormSpec n = cfg.auxiliary_norm ? NormSpec::from_json(*cfg.auxiliary_norm) : NormSpec::linf(s.group.dim());
  if (n.dim() != s.group.dim()) throw ConfigError("auxiliary norm must live on the whole algebra");

  std::vector<Covector> lambdas;
  for (const auto& c : cfg.covectors) lambdas.push_back(to_covector(c));
  for (const auto& c : random_covectors(cfg.random_covectors, n, s.group.dim(), cfg.seed)) lambdas.push_back(c);

  std::optional<SubmetryData> sub;
  if (cfg.submetry == "abelianization") {
    if (s.group.name() != "heisenberg" && s.group.name() != "heisenberg_carnot") {
      throw ConfigError("abelianization is available for the Heisenberg groups only");
    }
    sub = heisenberg_abelianization(s.norm, s.group.name() == "heisenberg_carnot");
  }

  MOptions mopt;
  mopt.seed ^= cfg.seed;
  CommandResult res;
  nlohmann::json certs = nlohmann::json::array();
  bool all = true;
  double min_window = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const Trajectory traj = integrate(s.group, s.norm, lambdas[k], s.g0, s.flow);
    const StabilityCertificate cert = certify_trajectory(s.group, s.norm, n, traj, mopt);
    nlohmann::json j = cert.to_json();
    j["invariants"] = invariants(traj, s.norm);
    j["events"] = traj.events.size();
    if (!std::isfinite(cert.window)) j["notice"] = "M vanishes: every window length is admissible";
    if (sub) j["abelianized"] = abelianized_minimality(traj, *sub, cert.window).to_json();
    all = all && cert.verdict;
    min_window = std::min(min_window, cert.window);
    certs.push_back(j);
  }
  nlohmann::json doc{{"config", cfg.to_json()}, {"certificates", certs}, {"all_verdicts", all}};
  doc["min_window"] = std::isfinite(min_window) ? nlohmann::json(min_window) : nlohmann::json(nullptr);
  if (s.group.is_finsler()) {
    const double bound = finsler_short_bound(s.group, s.norm, mopt);
    doc["short_curve_bound"] = std::isfinite(bound) ? nlohmann::json(bound) : nlohmann::json(nullptr);
  }
  const fs::path path = out / (cfg.name + "_certificate.json");
  write_json(path, doc);
  res.files.push_back(path);
  res.summary = {{"command", "certify"}, {"certificates", certs.size()}, {"all_verdicts", all},
                 {"min_window", doc["min_window"]}};
  return res;
}

CommandResult cmd_shortcut(const ScenarioConfig& cfg, const fs::path& out) {
  const ShortcutRecord rec = heisenberg_shortcut(cfg.epsilon, cfg.samples);
  CommandResult res;
  const fs::path csv = out / (cfg.name + "_curve.csv");
  write_trajectory(csv, rec.curve);
  res.files.push_back(csv);

  const fs::path planar = out / (cfg.name + "_planar.csv");
  {
    std::ofstream os(planar, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + planar.string());
    os << "x,y\n";
    for (const auto& c : rec.planar_corners) os << format_double(c[0]) << ',' << format_double(c[1]) << '\n';
  }
  res.files.push_back(planar);

  nlohmann::json doc = rec.to_json();
  doc["config"] = cfg.to_json();
  const fs::path path = out / (cfg.name + "_shortcut.json");
  write_json(path, doc);
  res.files.push_back(path);
  res.summary = {{"command", "shortcut"}, {"beta", rec.beta}, {"length", rec.length},
                 {"normal_length", rec.normal_length}, {"endpoint_error", rec.endpoint_error}};
  return res;
}

CommandResult cmd_faces(const ScenarioConfig& cfg, const fs::path& out) {
  const NormSpec norm = NormSpec::from_json(cfg.norm);
  if (!norm.is_polyhedral()) throw ConfigError("faces needs a polyhedral norm");
  const Polyhedron& p = norm.polyhedron();
  const StarCovering cov = star_covering(p);

  nlohmann::json faces = nlohmann::json::array();
  for (const Face& f : p.faces()) {
    faces.push_back({{"id", f.id}, {"dim", f.dim}, {"vertices", f.vertices}, {"witness", coords(f.witness)}});
  }
  nlohmann::json base = nlohmann::json::array();
  for (const auto& b : cov.base) base.push_back(coords(b));
  nlohmann::json doc{{"config", cfg.to_json()},
                     {"norm", norm.to_json()},
                     {"polyhedron", p.to_json()},
                     {"faces", faces},
                     {"star_covering", {{"base", base}, {"base_faces", cov.base_faces}, {"delta", cov.delta}}}};
  CommandResult res;
  const fs::path path = out / (cfg.name + "_faces.json");
  write_json(path, doc);
  res.files.push_back(path);
  res.summary = {{"command", "faces"}, {"faces", faces.size()}, {"facets", cov.base.size()}, {"delta", cov.delta}};
  return res;
}

CommandResult run_command(const ScenarioConfig& cfg, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string());
  if (cfg.command == "integrate") return cmd_integrate(cfg, out);
  if (cfg.command == "branch") return cmd_branch(cfg, out);
  if (cfg.command == "certify") return cmd_certify(cfg, out);
  if (cfg.command == "shortcut") return cmd_shortcut(cfg, out);
  if (cfg.command == "faces") return cmd_faces(cfg, out);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace subfinsler::tools
