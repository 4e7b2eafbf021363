#include <wavemap/scenario.hpp>

#include <CLI11.hpp>

#include <fmt/core.h>

#include <iostream>

namespace {

using nlohmann::json;
using namespace wavemap;

// Appends an analysis of `kind` unless the scenario already requests one.
void ensure_analysis(json& config, const std::string& kind) {
  json& list = config["analyses"];
  if (list.is_null()) list = json::array();
  for (const auto& a : list)
    if (a.at("kind") == kind) return;
  list.push_back({{"kind", kind}});
}

void require_builder(const json& config, const std::string& builder, const std::string& command) {
  if (!config.contains("data") || config["data"].at("builder") != builder)
    throw ConfigError(command + " needs data.builder = \"" + builder + "\"");
}

int run_sweep(json config, const std::string& out) {
  validate_scenario(config);
  const SweepResult result = run_scenario(config, out, workers_from_env());
  for (const auto& r : result.runs) {
    if (r.ok)
      fmt::print("run {} {}: {} t_end={} drift={:.3e}\n", r.index, r.label, r.stop_reason, r.t_end, r.energy_drift);
    else
      fmt::print("run {} {}: failed: {}\n", r.index, r.label, r.error);
  }
  return result.failures() == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for equivariant wave maps"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    return sub;
  };
  auto* simulate = add("simulate", "evolve every sweep point and run the requested analyses");
  auto* modulate = add("modulate", "simulate with the modulation analysis enabled");
  auto* diagnose = add("diagnose", "simulate with the blow-up diagnostics enabled");
  auto* exterior = add("exterior", "linear exterior-energy sweeps and channel search");
  auto* threshold = add("threshold", "below-threshold family runs with dispersion and invariant checks");
  auto* sharpness = add("sharpness", "glued above-threshold runs with blow-up checks");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors and unreadable config paths share the config-error code.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json config = load_scenario(config_path);
    if (simulate->parsed()) return run_sweep(config, out_dir);
    if (modulate->parsed()) {
      ensure_analysis(config, "modulation");
      return run_sweep(config, out_dir);
    }
    if (diagnose->parsed()) {
      ensure_analysis(config, "diagnostics");
      return run_sweep(config, out_dir);
    }
    if (threshold->parsed()) {
      require_builder(config, "below_threshold", "threshold");
      ensure_analysis(config, "dispersion");
      ensure_analysis(config, "invariants");
      return run_sweep(config, out_dir);
    }
    if (sharpness->parsed()) {
      require_builder(config, "glued", "sharpness");
      ensure_analysis(config, "blowup");
      return run_sweep(config, out_dir);
    }
    if (exterior->parsed()) {
      if (!config.contains("exterior")) throw ConfigError("exterior needs an \"exterior\" block");
      const ExteriorReport rep = run_exterior(config, out_dir);
      std::cout << rep.summary.dump(2) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
