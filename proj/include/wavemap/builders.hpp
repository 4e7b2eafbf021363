#pragma once

#include <wavemap/evolve.hpp>
#include <wavemap/field.hpp>

#include <string>

namespace wavemap {

/// C² quintic step: 1 on r <= a, 0 on r >= b.
double smooth_cutoff(double r, double a, double b);

struct RateAnsatzOptions {
  int ell = 1;
  TargetGeometry target = TargetGeometry::sphere();
  double cap_inner = 1.0; ///< velocity untouched on r <= cap_inner
  double cap_outer = 2.0; ///< velocity zero on r >= cap_outer
};

/// psi = Q(r/lambda(t0)), psi_t = -lambda'(t0) (r/lambda²) Q'(r/lambda) with
/// lambda(t) = (1 - t)^(1 + nu), velocity cut off smoothly between
/// cap_inner and cap_outer. Degree (0, 1).
FieldState build_rate_ansatz(GridPtr grid, double nu, double t0, const RateAnsatzOptions& options = {});

enum class BumpShape { ring, shell };

std::string to_string(BumpShape s);
BumpShape parse_bump_shape(const std::string& s);

/// Unit-amplitude profile: ring = r e^{-r²}, shell = r² e^{-r²}.
double bump_profile(BumpShape shape, double r);

struct BelowThresholdData {
  FieldState state;
  double amplitude = 0.0;
  double energy = 0.0;
};

/// Static degree-(0,0) data lower_vacuum + A·bump(r) on the sphere target
/// with A solved by secant iteration so that the energy equals
/// `energy_target` to 1e-6. Requires 0 < energy_target < 2 E(Q); throws
/// std::domain_error when the family cannot reach the target.
BelowThresholdData build_below_threshold_family(GridPtr grid, double energy_target, BumpShape shape,
                                                int ell = 1);

struct GluedOptions {
  double inner_scale = 0.1;       ///< bubble scale s of the inner datum
  double match_radius = 2.0;      ///< gluing radius
  double collar_half_width = 0.5; ///< blend on [match - w, match + w]
  double probe_dr = 1e-3;         ///< resolution of the certification runs
  double probe_t_final = 1.0;
  std::size_t bisection_steps = 4;
};

struct GluedData {
  FieldState state;
  double kick_amplitude = 0.0;
  double lambda_glue = 0.0;
  double matching_residual = 0.0; ///< |(C* - Q(match lambda_glue)) - inner(match)|
  double inner_energy = 0.0;
  double collar_energy = 0.0;
  double energy = 0.0;
  std::size_t certification_runs = 0;
};

/// Inner degree-1 datum Q(r/s) with inward kick psi_t = (A/s)(r/s) e^{-(r/s)²}.
FieldState glued_inner_datum(GridPtr grid, double scale, double amplitude);

/// Solves C* - Q(match lambda) = value for lambda. Throws std::domain_error
/// ("unmatchable data") unless value lies in (0, C*).
double solve_glue_scale(double value, double match_radius);

/// Degree-(0,0) data above 2 E(Q): the inner kicked bubble on r <= match,
/// the reflected bubble C* - Q(lambda_glue r) outside, blended over the
/// collar. The kick amplitude is the smallest of a bisection between 0 and
/// the energy cap sqrt(8 delta) whose inner evolution is diagnosed as
/// blow-up; throws std::runtime_error if even the cap does not blow up.
GluedData build_glued_threshold_data(GridPtr grid, double delta, const GluedOptions& options = {});

} // namespace wavemap
