#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace subfinsler::tools {

/// Malformed or inconsistent scenario file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string command;  // integrate | branch | certify | shortcut | faces
  std::string name;
  nlohmann::json group;  // registry name or GroupSpec object
  nlohmann::json norm;   // NormSpec object
  std::vector<std::vector<double>> covectors;
  /// Start point as exponential coordinates; identity when absent.
  std::optional<std::vector<double>> start;
  double horizon = 1.0;
  double step = 1e-3;
  std::string rule = "persistent";
  std::optional<std::vector<double>> start_control;
  double event_resolution = 1e-3;
  int max_switches = 100000;
  // branch
  double agree_tol = 1e-6;
  double split_tol = 1e-3;
  std::optional<std::vector<double>> reference_control;
  // certify
  std::optional<nlohmann::json> auxiliary_norm;
  int random_covectors = 0;
  std::string submetry;  // "" or "abelianization"
  // shortcut
  double epsilon = 0.0;
  int samples = 100;

  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::filesystem::path& path);

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

}  // namespace subfinsler::tools
