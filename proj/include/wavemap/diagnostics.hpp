#pragma once

#include <wavemap/evolve.hpp>

#include <vector>

namespace wavemap {

/// Smooth cutoff: 1 on [0, 1], 0 beyond 2, quintic C² transition
/// chi(x) = 1 - S(x - 1) with S(s) = 10s³ - 15s⁴ + 6s⁵.
double cutoff(double x);
double cutoff_derivative(double x);
/// 1 + sup|chi'|: bounds the virial remainder by this multiple of E_R^∞.
double virial_band_constant();

struct VirialReport {
  double R = 0.0;
  double T = 0.0;
  double lhs = 0.0;                 ///< <chi_R psi_t | r psi_r> at T minus at 0
  double kinetic_integral = 0.0;    ///< ∫_0^T ∫ psi_t² r dr dt
  double exterior_correction = 0.0; ///< C ∫_0^T E_R^∞ dt, the admissible band
  double residual = 0.0;            ///< lhs + kinetic_integral
  double exact_correction = 0.0;    ///< ∫_0^T of the explicit remainder terms
  double sup_exterior = 0.0;        ///< sup_t E_R^∞
  bool inside_band() const { return std::abs(residual) <= exterior_correction; }
};

/// Virial balance on [0, T]. T must coincide with a snapshot time and the
/// snapshot spacing must not exceed T/200 ("insufficient sampling"
/// std::invalid_argument otherwise).
VirialReport virial_check(const EvolutionTrace& trace, double R, double T);

/// <chi_R psi_t | r psi_r> = ∫ chi(r/R) psi_t psi_r r² dr.
double virial_pairing(const FieldState& state, double R);

struct WindowPoint {
  double t = 0.0;
  double value = 0.0;
};

/// E over [lambda_frac (T+ - t), T+ - t] at every snapshot before T+.
/// Throws std::domain_error without a blow-up diagnosis.
std::vector<WindowPoint> self_similar_window(const EvolutionTrace& trace, double lambda_frac);

/// ∫_0^(T+ - t) psi_t² r dr for one snapshot.
double cone_kinetic(const FieldState& state, double t_plus);

/// (1/(T+ - t)) ∫_t^t_stop ∫_0^(T+ - s) psi_t² r dr ds by the trapezoid
/// rule over snapshots. Throws std::domain_error without a blow-up
/// diagnosis.
double averaged_kinetic_cone(const EvolutionTrace& trace, double t);

/// Same, with an explicit blow-up time.
double averaged_kinetic_cone(const EvolutionTrace& trace, double t, double t_plus);

/// Threshold schedule theta_n = theta0 / n^power for the discrete time
/// selection.
struct SelectionSchedule {
  double theta0 = 1.0;
  double power = 1.0;
  double threshold(std::size_t n) const;
};

struct SelectedTime {
  std::size_t snapshot = 0;
  double t = 0.0;
  double averaged = 0.0; ///< averaged_kinetic_cone at t
  double instant = 0.0;  ///< cone_kinetic at t
};

/// Greedy scan over snapshots: t_n is the first snapshot after t_(n-1)
/// where both the averaged and the instantaneous cone kinetic energy fall
/// below theta_n and lambda_fit < T+ - t. Throws std::domain_error without
/// a blow-up diagnosis; an empty result is returned, not thrown.
std::vector<SelectedTime> select_times(const EvolutionTrace& trace, const SelectionSchedule& schedule = {});

} // namespace wavemap
