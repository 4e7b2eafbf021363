#pragma once

#include <wavemap/evolve.hpp>
#include <wavemap/functionals.hpp>
#include <wavemap/harmonic.hpp>

#include <vector>

namespace wavemap {

struct ModulationFit {
  double lambda = 0.0;
  double distance_H = 0.0;       ///< ‖psi - Q(·/lambda)‖_H
  double remainder_energy = 0.0; ///< E(psi - Q(·/lambda), psi_t)
  double excess_alpha = 0.0;     ///< E(psi, 0) - E(Q)
};

/// Half-energy scale: the lambda with E_0^lambda(psi, 0) = E(Q)/2, by
/// bisection to relative tolerance 1e-10. Requires psi(0) at the lower
/// vacuum; throws std::domain_error ("insufficient interior energy") when
/// the level is not attained.
ModulationFit fit_scale(const FieldState& state);

struct CoercivityPoint {
  double alpha = 0.0;
  double distance = 0.0;
  double lambda = 0.0;
};

/// (alpha, distance) for each static degree-(0,1) state, sorted by alpha.
std::vector<CoercivityPoint> coercivity_curve(const std::vector<FieldState>& family);

struct RadiationCap {
  FieldState data;         ///< capped pair, degree (1,1)
  double cap_energy = 0.0; ///< E over [0, r_n] of the capped data
  double r_n = 0.0;
};

/// Replaces psi on [0, r_n] by the line from C* at r = 0 to psi(r_n) and
/// zeroes psi_t there. Throws std::domain_error ("cap too energetic") when
/// |C* - psi(r_n)| > 0.5.
RadiationCap extract_radiation_data(const FieldState& state, double r_n);

struct Remainder {
  FieldState epsilon;
  HNorm norm;
  double energy = 0.0;
};

/// epsilon = psi - radiation - Q(·/fit.lambda), epsilon_t = psi_t - radiation_t.
/// `radiation` is the degree-zero radiation term on the same grid.
Remainder subtract_bubble(const FieldState& state, const ModulationFit& fit, const FieldState& radiation);

struct BubblingPoint {
  std::size_t snapshot = 0;
  double t = 0.0;
  double lambda = 0.0;
  double ratio = 0.0;    ///< lambda / (T+ - t)
  double window = 0.0;   ///< comparison radius in original units
  double distance = 0.0; ///< ‖psi - sign Q(·/lambda)‖_H on [0, window]
  double distance_plus = 0.0;
  double distance_minus = 0.0;
  int sign = 1;
};

struct BubblingOptions {
  double theta0 = 1.5; ///< selection schedule theta_n = theta0 / n^power
  double power = 1.0;
};

struct BubblingReport {
  double t_plus = 0.0;
  std::vector<BubblingPoint> points;
  bool ratio_strictly_decreasing = false;
};

/// Times from select_times, lambda_n from fit_scale, and the H-distance to
/// ±Q(·/lambda_n) on r <= min(sqrt(lambda_n), T+ - t_n). Throws
/// std::domain_error ("no bubbling certificate") if no time qualifies.
BubblingReport bubbling_extract(const EvolutionTrace& trace, const BubblingOptions& options = {});

struct RemainderPoint {
  double t = 0.0;
  double lambda = 0.0;
  double norm = 0.0;           ///< ‖epsilon‖_{H x L²}
  double energy = 0.0;         ///< E(epsilon)
  double energy_defect = 0.0;  ///< E(psi) - E(radiation) - E(Q) - E(epsilon)
};

struct RadiationOptions {
  /// Reference time for the cap; negative selects the last bubbling time.
  double t_ref = -1.0;
  /// Cap radius; non-positive selects the radius in [2 lambda, T+ - t_ref]
  /// where psi is closest to C*.
  double r_ref = -1.0;
};

struct RemainderReport {
  double t_ref = 0.0;
  double r_ref = 0.0;
  double cap_energy = 0.0;
  double radiation_energy = 0.0;
  std::vector<RemainderPoint> points;
  bool norm_decreasing = false;
};

/// Builds the radiation term by capping psi(t_ref) at r_ref and evolving
/// the capped data backward to every bubbling time at or before t_ref, then
/// reports the remainder of the decomposition psi = radiation + Q(·/lambda) + epsilon.
RemainderReport remainder_sequence(const EvolutionTrace& trace, const BubblingReport& bubbling,
                                   const RadiationOptions& options = {});

struct AdditivityReport {
  double energy_of_sum = 0.0;
  double sum_of_energies = 0.0;
  double defect = 0.0; ///< |E(Σ) - Σ E| / Σ E
};

struct ScaledComponent {
  FieldState state;
  double scale = 1.0;
};

/// Energy defect of a superposition of components on a common grid. Scales
/// must be pairwise separated by a factor >= 100.
AdditivityReport energy_near_additivity(const std::vector<ScaledComponent>& components);

} // namespace wavemap
