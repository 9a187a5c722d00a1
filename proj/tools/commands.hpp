#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenario.hpp"

namespace subfinsler::tools {

struct CommandResult {
  std::vector<std::filesystem::path> files;
  /// Short machine-readable summary, also printed unless --quiet.
  nlohmann::json summary;
};

CommandResult cmd_integrate(const ScenarioConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_branch(const ScenarioConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_certify(const ScenarioConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_shortcut(const ScenarioConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_faces(const ScenarioConfig& cfg, const std::filesystem::path& out);

/// Dispatches on cfg.command.
CommandResult run_command(const ScenarioConfig& cfg, const std::filesystem::path& out);

}  // namespace subfinsler::tools
