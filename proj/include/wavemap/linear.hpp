#pragma once

#include <wavemap/grid.hpp>

#include <filesystem>
#include <functional>
#include <vector>

namespace wavemap {

/// Radial linear wave on a grid in ambient dimension `dim`. For the free
/// operator v is even at the axis; for the repulsive 2d operator v is the
/// wave-map perturbation with v(0) = 0.
struct LinearState {
  GridPtr grid;
  std::vector<double> v;
  std::vector<double> vdot;
  double t = 0.0;
  int dim = 4;

  static LinearState sample(GridPtr grid, int dim, const std::function<double(double)>& v,
                            const std::function<double(double)>& vdot);
  std::size_t size() const { return v.size(); }
  /// Throws std::invalid_argument on mismatched arrays, non-finite values or dim < 1.
  void validate() const;
};

/// Largest node radius where |v| or |vdot| exceeds 1e-12 of its maximum.
double support_radius(const LinearState& s);

/// Leapfrog evolution of v_tt = v_rr + (dim - 1)/r v_r from s.t to `t`
/// with a free (even) axis. Requires r_max >= (t - s.t) + support radius.
LinearState evolve_free(const LinearState& data, double t, double cfl = 0.5);

/// Leapfrog evolution of phi_tt = phi_rr + phi_r/r - phi/r² from s.t to `t`.
/// Requires dim = 2 and phi(0) = 0.
LinearState evolve_repulsive_2d(const LinearState& data, double t, double cfl = 0.5);

/// ∫_a^∞ (v_r² + vdot²) r^(dim-1) dr.
double free_energy(const LinearState& s, double a = 0.0);

/// ∫_a^∞ (phi_r² + phi²/r² + phidot²) r dr.
double repulsive_energy(const LinearState& s, double a = 0.0);

/// ‖(v, vdot)‖ on r >= t in Ḣ¹ x L² of R^dim.
double exterior_energy(const LinearState& s, double t);

/// ‖(phi, phidot)‖ on r >= t in H x L² for the repulsive 2d operator.
double exterior_energy_2d(const LinearState& s, double t);

struct RatioPoint {
  int dim = 0; ///< 2 marks the repulsive operator
  double t = 0.0;
  double ratio = 0.0;
};

struct ExteriorProfile {
  std::vector<RatioPoint> points;
  double min_free = 0.0;
  double min_repulsive = 0.0; ///< NaN unless the repulsive pass ran
};

struct ProfileOptions {
  double dr = 2e-3;
  double cfl = 0.4;
  /// Also evolve phi0 = r f under the repulsive 2d operator (dim = 4 only).
  bool repulsive = false;
};

/// Ratios ‖(v, v_t)(t)‖_{r >= t} / ‖f‖_{Ḣ¹} for data (f, 0) over the
/// increasing time grid, and the repulsive analogue against ‖r f‖_H.
ExteriorProfile exterior_ratio_profile(const std::function<double(double)>& f, int dim,
                                       const std::vector<double>& times,
                                       const ProfileOptions& options = {});

/// Even cubic B-spline family f(r) = Σ c_k (B(r/Δ - k) + B(r/Δ + k)) / (1 + [k = 0]).
struct SplineDatum {
  std::vector<double> coefficients;
  double spacing = 0.3;

  double operator()(double r) const;
  double support() const { return (static_cast<double>(coefficients.size()) + 1.0) * spacing; }
};

struct ChannelSearchOptions {
  int dim = 6;
  double t = 2.0;
  std::size_t basis = 10;
  double spacing = 0.1;
  double dr = 2.5e-3;
  double initial_step = 0.5;
  double min_step = 1e-3;
  std::size_t max_evaluations = 4000;
};

struct ChannelSearchResult {
  SplineDatum datum;
  double ratio = 0.0;
  double refined_ratio = 0.0; ///< same datum re-evaluated at dr / 2
  std::size_t evaluations = 0;
};

/// Ratio at time options.t for the spline datum; the ratio is invariant
/// under rescaling the coefficients. The spacing must span at least 20
/// cells: narrower data lets grid dispersion hold energy inside the cone.
double spline_exterior_ratio(const SplineDatum& datum, const ChannelSearchOptions& options);

/// Coordinate search minimizing the exterior ratio at a fixed time over the
/// spline family, started from the single-bump datum c = e_0.
ChannelSearchResult minimize_exterior_ratio(const ChannelSearchOptions& options = {});

/// `dim,t,ratio` rows.
void write_exterior_csv(const std::filesystem::path& path, const std::vector<RatioPoint>& points);

} // namespace wavemap
