#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "scenario.hpp"
#include "subfinsler/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

void write_diagnostic(const std::filesystem::path& out, const std::string& name, const nlohmann::json& j) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  std::ofstream os(out / (name + "_error.json"), std::ios::binary);
  if (os) os << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  namespace sft = subfinsler::tools;

  CLI::App app{"Normal curves, branching and face-stability certificates on sub-Finsler Lie groups"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
  bool quiet = false;
  app.add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Override the scenario RNG seed");
  app.add_option("--step", step, "Override the integration step")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress the summary on stdout");

  for (const char* name : {"integrate", "branch", "certify", "shortcut", "faces"}) {
    app.add_subcommand(name);
  }
  app.get_subcommand("integrate")->description("Integrate normal curves; writes CSV and metadata JSON");
  app.get_subcommand("branch")->description("Compare normal curves and report branching");
  app.get_subcommand("certify")->description("Face-stability certificates for polyhedral norms");
  app.get_subcommand("shortcut")->description("Four-piece Heisenberg shortcut record");
  app.get_subcommand("faces")->description("Face lattice and star covering of a polyhedral ball");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  sft::ScenarioConfig cfg;
  try {
    cfg = sft::ScenarioConfig::load(config_path);
    if (cfg.command != command) {
      throw sft::ConfigError("scenario is for '" + cfg.command + "', not '" + command + "'");
    }
    if (seed) cfg.seed = *seed;
    if (step) cfg.step = *step;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const sft::CommandResult res = sft::run_command(cfg, out_dir);
    if (!quiet) {
      for (const auto& f : res.files) std::cout << "wrote " << f.string() << '\n';
      std::cout << res.summary.dump() << '\n';
    }
    return kOk;
  } catch (const subfinsler::IntegrationError& e) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& ev : e.events()) events.push_back({{"t", ev.t}, {"from", ev.from_face}, {"to", ev.to_face}});
    write_diagnostic(out_dir, cfg.name,
                     {{"error", e.what()}, {"kind", "integration"}, {"t", e.time()}, {"events", events},
                      {"config", cfg.to_json()}});
    std::cerr << "integration failed at t = " << e.time() << ": " << e.what() << '\n';
    return kNumericError;
  } catch (const subfinsler::InternalError& e) {
    write_diagnostic(out_dir, cfg.name, {{"error", e.what()}, {"kind", "internal"}, {"config", cfg.to_json()}});
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const sft::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {  // InputError, ConstructionError
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const subfinsler::UnsupportedError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    write_diagnostic(out_dir, cfg.name, {{"error", e.what()}, {"kind", "numeric"}, {"config", cfg.to_json()}});
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
}
