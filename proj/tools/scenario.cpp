#include "scenario.hpp"

#include <fstream>
#include <set>

namespace subfinsler::tools {
namespace {

const std::set<std::string> kCommands{"integrate", "branch", "certify", "shortcut", "faces"};
const std::set<std::string> kKeys{"command",  "name",         "group",          "norm",      "covectors",
                                  "start",    "horizon",      "step",           "rule",      "start_control",
                                  "agree_tol", "split_tol",   "reference_control", "auxiliary_norm",
                                  "random_covectors", "submetry", "epsilon",    "samples",   "seed",
                                  "event_resolution", "max_switches"};

template <typename T>
T get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j{{"command", command},     {"name", name},           {"group", group},
                   {"norm", norm},           {"covectors", covectors}, {"horizon", horizon},
                   {"step", step},           {"rule", rule},           {"event_resolution", event_resolution},
                   {"max_switches", max_switches},           {"agree_tol", agree_tol},
                   {"split_tol", split_tol}, {"random_covectors", random_covectors},
                   {"submetry", submetry},   {"epsilon", epsilon},     {"samples", samples},
                   {"seed", seed}};
  if (start) j["start"] = *start;
  if (start_control) j["start_control"] = *start_control;
  if (reference_control) j["reference_control"] = *reference_control;
  if (auxiliary_norm) j["auxiliary_norm"] = *auxiliary_norm;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  for (const auto& item : j.items()) {
    if (!kKeys.count(item.key())) throw ConfigError("unknown scenario field '" + item.key() + "'");
  }
  ScenarioConfig c;
  c.command = get<std::string>(j, "command", "");
  if (!kCommands.count(c.command)) throw ConfigError("unknown or missing command '" + c.command + "'");
  c.name = get<std::string>(j, "name", c.command);
  if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos) throw ConfigError("invalid scenario name");
  c.group = j.value("group", nlohmann::json());
  c.norm = j.value("norm", nlohmann::json());
  c.covectors = get<std::vector<std::vector<double>>>(j, "covectors", {});
  if (j.contains("start")) c.start = get<std::vector<double>>(j, "start", {});
  c.horizon = get<double>(j, "horizon", c.horizon);
  c.step = get<double>(j, "step", c.step);
  c.rule = get<std::string>(j, "rule", c.rule);
  if (j.contains("start_control")) c.start_control = get<std::vector<double>>(j, "start_control", {});
  c.event_resolution = get<double>(j, "event_resolution", c.event_resolution);
  c.max_switches = get<int>(j, "max_switches", c.max_switches);
  c.agree_tol = get<double>(j, "agree_tol", c.agree_tol);
  c.split_tol = get<double>(j, "split_tol", c.split_tol);
  if (j.contains("reference_control")) c.reference_control = get<std::vector<double>>(j, "reference_control", {});
  if (j.contains("auxiliary_norm")) c.auxiliary_norm = j.at("auxiliary_norm");
  c.random_covectors = get<int>(j, "random_covectors", 0);
  c.submetry = get<std::string>(j, "submetry", "");
  c.epsilon = get<double>(j, "epsilon", 0.0);
  c.samples = get<int>(j, "samples", c.samples);
  c.seed = get<std::uint64_t>(j, "seed", 0);

  if (!(c.step > 0.0)) throw ConfigError("step must be positive");
  if (!(c.horizon >= 0.0)) throw ConfigError("horizon must be nonnegative");
  if (!(c.event_resolution > 0.0 && c.event_resolution < 1.0)) throw ConfigError("event_resolution must lie in (0, 1)");
  if (c.max_switches < 0) throw ConfigError("max_switches must be nonnegative");
  if (c.random_covectors < 0) throw ConfigError("random_covectors must be nonnegative");
  if (!c.submetry.empty() && c.submetry != "abelianization") throw ConfigError("unknown submetry '" + c.submetry + "'");
  const bool needs_group = c.command == "integrate" || c.command == "branch" || c.command == "certify";
  if (needs_group && c.group.is_null()) throw ConfigError("command '" + c.command + "' needs a group");
  if ((needs_group || c.command == "faces") && c.norm.is_null()) throw ConfigError("command '" + c.command + "' needs a norm");
  if (c.command == "branch" && c.covectors.size() + (c.reference_control ? 1 : 0) < 2) {
    throw ConfigError("branch needs two covectors, or one covector and a reference control");
  }
  if ((c.command == "integrate") && c.covectors.empty()) throw ConfigError("integrate needs covectors");
  if (c.command == "certify" && c.covectors.empty() && c.random_covectors == 0) {
    throw ConfigError("certify needs covectors or random_covectors");
  }
  if (c.command == "shortcut" && !(c.epsilon > 0.0)) throw ConfigError("shortcut needs epsilon > 0");
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace subfinsler::tools
