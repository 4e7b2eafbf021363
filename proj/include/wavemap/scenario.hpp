#pragma once

#include <wavemap/evolve.hpp>
#include <wavemap/schema.hpp>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wavemap {

/// Reads and schema-validates a scenario file; throws ConfigError.
nlohmann::json load_scenario(const std::filesystem::path& path);

/// Validates an in-memory scenario document; throws ConfigError.
void validate_scenario(const nlohmann::json& config);

struct RunSpec {
  std::size_t index = 0;
  std::string label;    ///< "path=value;..." of the sweep point, empty without a sweep
  nlohmann::json doc;   ///< scenario with the sweep point applied, sweep removed
};

/// Cartesian product of the sweep axes in config order (first axis
/// slowest). A scenario without a sweep yields one run.
std::vector<RunSpec> expand_sweep(const nlohmann::json& config);

/// Grid from the "grid" block: uniform, or stretched when "stretch" is given.
GridPtr build_grid(const nlohmann::json& grid);

/// Initial data from the "data" block on `grid`. Builder-specific details
/// (amplitudes, glue scale, ...) are written into `details`.
FieldState build_data(const nlohmann::json& doc, GridPtr grid, nlohmann::json& details);

/// Solver settings from the "solver" block; dr and r_max come from the grid.
SolverConfig solver_config(const nlohmann::json& doc, const RadialGrid& grid);

struct RunRecord {
  std::size_t index = 0;
  std::string label;
  bool ok = false;
  std::string error;
  std::string stop_reason;
  double t_end = 0.0;
  double energy = 0.0;
  double energy_drift = 0.0;
  std::optional<double> t_plus;
  std::optional<int> degree_m;
  std::optional<int> degree_n;
  std::map<std::string, double> metrics;
};

/// Builds, evolves and analyses one run, writing its artifacts into `dir`.
/// Failures are recorded in the returned record, never thrown.
RunRecord execute_run(const RunSpec& spec, const std::filesystem::path& dir);

struct SweepResult {
  std::vector<RunRecord> runs;
  std::size_t failures() const;
};

/// Runs every sweep point with up to `workers` concurrent runs, each in
/// out/run_<index>, then writes out/summary.csv in config order.
SweepResult run_scenario(const nlohmann::json& config, const std::filesystem::path& out, std::size_t workers);

/// Writes summary.csv; metric columns are the union of metric names, sorted.
void write_summary(const std::filesystem::path& path, const SweepResult& result);

/// WAVEMAP_WORKERS, or 1 when unset. Throws ConfigError on a malformed value.
std::size_t workers_from_env();

struct ExteriorReport {
  nlohmann::ordered_json summary;
  std::size_t rows = 0;
};

/// Exterior-energy sweeps and the optional channel search of the
/// "exterior" block. Writes exterior_<member>.csv per family member,
/// exterior_summary.csv (member,dim,min_ratio; dim 2 is the repulsive
/// 4d run), search.json when a search is configured, and exterior.json
/// with the per-dimension floors into `out`.
ExteriorReport run_exterior(const nlohmann::json& config, const std::filesystem::path& out);

} // namespace wavemap
