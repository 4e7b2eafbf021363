#pragma once

#include <wavemap/field.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavemap {

enum class Formulation { psi_form, reduced_4d };
enum class StopReason { completed, blowup_underresolved, gradient_blowup, boundary_contact };
/// How the unresolved blow-up time is extrapolated from a stopped trace.
enum class TPlusRule {
  two_lambda, ///< t_stop + 2 lambda(t_stop)
  power_fit,  ///< T from lambda(t) ≈ A (T - t)^p fitted over the last decade of lambda
};

std::string to_string(Formulation f);
std::string to_string(StopReason r);
std::string to_string(TPlusRule r);
TPlusRule parse_t_plus_rule(const std::string& s);
Formulation parse_formulation(const std::string& s);
StopReason parse_stop_reason(const std::string& s);

/// Raised by step() when the update produces a non-finite value.
class NumericalBlowup : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct StopRule {
  double min_lambda_cells = 8.0;    ///< stop when lambda_fit < min_lambda_cells * dr
  double max_gradient_factor = 0.25; ///< stop when max|psi_r| > max_gradient_factor / dr
};

struct SolverConfig {
  double dr = 1e-2;
  double cfl = 0.5;
  double t_final = 1.0;
  double r_max = 10.0;
  std::size_t snapshot_stride = 50;
  StopRule stop;
  Formulation formulation = Formulation::psi_form;
  /// Radius beyond which the data is stationary; r_max must exceed
  /// t_final + support_radius so the pinned outer node stays exact.
  double support_radius = 0.0;
  /// Candidate blow-up time; enables the E_cone series E_0^(t_plus - t).
  std::optional<double> t_plus;
  TPlusRule t_plus_rule = TPlusRule::power_fit;

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
  double dt() const { return cfl * dr; }
};

struct SeriesRow {
  double t = 0.0;
  double E_total = 0.0;
  double E_cone = 0.0; ///< NaN without a t_plus candidate
  double lambda = 0.0; ///< NaN when the half-energy level is not reached
  double max_psi = 0.0;
  double max_psir = 0.0;
  double E_kinetic = 0.0; ///< ∫ psi_t² r dr; not part of series.csv
};

struct EvolutionTrace {
  std::vector<FieldState> snapshots;
  std::vector<SeriesRow> series;
  StopReason stop_reason = StopReason::completed;
  double t_end = 0.0;
  /// max over accepted steps of |E(t) - E(0)| / E(0).
  double energy_drift = 0.0;
  SolverConfig config;

  /// Extrapolated blow-up time per config.t_plus_rule; empty for completed
  /// runs or when lambda is undefined at the stop.
  std::optional<double> t_plus() const;
  bool blew_up() const {
    return stop_reason == StopReason::blowup_underresolved || stop_reason == StopReason::gradient_blowup;
  }
};

/// One velocity-Verlet step of the psi-form equation
///   psi_tt = psi_rr + psi_r/r - ell² f(psi)/r².
/// Axis and outer nodes are held fixed. Throws std::invalid_argument if
/// dt exceeds cfl * h_min and NumericalBlowup on non-finite output.
FieldState step(const FieldState& state, double dt, double cfl = 0.5);

/// Evolves to config.t_final or until the stop rule fires. The data grid
/// must have minimal spacing config.dr and outer radius config.r_max.
EvolutionTrace evolve(const FieldState& data, const SolverConfig& config);

/// Evolution through u = psi/r, u_tt = Δ_4 u + (2ru - sin 2ru)/(2r³),
/// for sphere data with ell = 1 and psi(0) = 0. The trace is reported in
/// psi variables.
EvolutionTrace evolve_reduced(const FieldState& data, const SolverConfig& config);

/// max over common snapshot times of ‖a - b‖_{H x L²(r >= R + t)}.
/// Requires identical grids and snapshot times.
double finite_speed_check(const EvolutionTrace& a, const EvolutionTrace& b, double R);

/// Writes series.csv, snap_<i>.csv/.json and summary.json into `dir`.
/// Snapshot files are written for every `snapshot_every`-th snapshot and
/// the last one; 0 writes none.
void write_trace(const std::filesystem::path& dir, const EvolutionTrace& trace, std::size_t snapshot_every = 1);

} // namespace wavemap
