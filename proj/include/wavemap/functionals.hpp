#pragma once

#include <wavemap/field.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <span>

namespace wavemap {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct EnergyReport {
  double total = 0.0;
  double kinetic = 0.0;
  double gradient = 0.0;
  double potential = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Localized energy ∫_a^b (psi_t² + psi_r² + ell² g(psi)²/r²) r dr.
///
/// The integrand is integrated exactly for the piecewise model used by the
/// solver: psi linear on each cell (so psi_r is a cell constant) and the
/// kinetic and potential densities linear between nodes. The result is
/// therefore additive over adjacent intervals and, over [0, r_max], equals
/// the energy the leapfrog scheme conserves. When b is infinite, a static
/// harmonic tail psi - n C* ~ c r^-ell beyond r_max is added (ell g(psi_N)²).
EnergyReport energy(const FieldState& state, double a = 0.0, double b = infinity);

/// Static energy E(psi, 0) on [a, b].
double static_energy(const FieldState& state, double a = 0.0, double b = infinity);

/// Cumulative static energy E_0^{r_i}(psi, 0) at every node, without tail.
std::vector<double> static_energy_profile(const FieldState& state);

struct HNorm {
  double h = 0.0;  ///< (∫ (psi_r² + psi²/r²) r dr)^1/2
  double l2 = 0.0; ///< (∫ psi_t² r dr)^1/2
  double total() const { return std::sqrt(h * h + l2 * l2); }
};

/// H x L² norm on [a, b]; psi²/r² uses its finite limit at r = 0.
HNorm h_norm(const RadialGrid& grid, std::span<const double> psi, std::span<const double> psidot,
             double a = 0.0, double b = infinity);
HNorm h_norm(const FieldState& state, double a = 0.0, double b = infinity);

/// Raw energy integral on spans; used where no FieldState exists.
EnergyReport energy(const RadialGrid& grid, std::span<const double> psi,
                    std::span<const double> psidot, int ell, const TargetGeometry& target,
                    double a, double b);

struct Degree {
  int m = 0; ///< psi(0) = m C*
  int n = 0; ///< psi(r_max) ≈ n C*
  friend bool operator==(const Degree&, const Degree&) = default;
};

/// Topological class of the data; throws std::domain_error ("open-ended
/// data") when psi(r_max) is not within 0.1 C* of a multiple of C*.
Degree classify_degree(const FieldState& state);

/// G(psi) = ∫_0^psi |g(ρ)| dρ by adaptive Gauss-Kronrod quadrature.
double G_accumulate(const TargetGeometry& target, double psi);

struct BogomolnySplit {
  double kinetic = 0.0;
  double defect = 0.0;      ///< ∫ (psi_r - ell g(psi)/r)² r dr
  double topological = 0.0; ///< 2 ell ∫_{psi(0)}^{psi(∞)} g
  double sum() const { return kinetic + defect + topological; }
};

/// Perfect-square split of the energy. psi(∞) is taken as the class value
/// n C* so the sum matches the tail-corrected total energy.
BogomolnySplit bogomolny_split(const FieldState& state);

/// max_i |psi_i|.
double pointwise_bound(const FieldState& state);

/// Smallest lambda with E_0^lambda(psi, 0) = level, found by bisection on
/// the continuous nondecreasing map lambda -> E_0^lambda. Empty if the
/// static energy on the whole grid does not exceed `level`.
std::optional<double> half_energy_scale(const FieldState& state, double level,
                                        double rel_tol = 1e-10);

/// max |psi_r| over cells.
double max_gradient(const RadialGrid& grid, std::span<const double> psi);

} // namespace wavemap
