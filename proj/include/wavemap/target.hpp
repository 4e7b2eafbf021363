#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wavemap {

enum class TargetKind { sphere, yang_mills, custom };

/// Rotationally symmetric target with metric dρ² + g(ρ)² dω².
///
/// Sphere: g = sin, C* = π. Yang-Mills: g = (1 - ρ²)/2 with vacua ±1, so
/// C* = 1 and the ground state runs from -1 to +1. Custom targets are given
/// by samples of g on a uniform ρ-grid over [0, C*]; g is extended as an
/// odd, 2C*-periodic function.
class TargetGeometry {
public:
  static TargetGeometry sphere();
  static TargetGeometry yang_mills();
  /// `g_samples[k]` = g(k * C*/(n-1)); the last sample must vanish.
  static TargetGeometry custom(std::span<const double> g_samples, double c_star);
  /// Reads a two-column CSV `rho,g` with uniformly spaced rho starting at 0.
  static TargetGeometry load_table(const std::string& path);
  static TargetGeometry from_name(const std::string& name);

  TargetKind kind() const { return kind_; }
  std::string name() const;

  double g(double rho) const;
  double g_prime(double rho) const;
  /// f = g g'; the force term of the equivariant equation.
  double f(double rho) const;

  double c_star() const { return c_star_; }
  /// Vacuum at which ground states start (0 for odd targets, -1 for Yang-Mills).
  double lower_vacuum() const { return kind_ == TargetKind::yang_mills ? -1.0 : 0.0; }
  double upper_vacuum() const { return c_star_; }

  /// ∫_a^b g(ρ) dρ (signed).
  double integral(double a, double b) const;
  /// Energy of the ell-equivariant ground state: 2 ell ∫ g between the vacua.
  double ground_state_energy(int ell) const;

  /// True if g vanishes somewhere strictly inside (lower_vacuum, C*).
  bool has_interior_zero() const;

private:
  struct Table;
  TargetKind kind_ = TargetKind::sphere;
  double c_star_ = 0.0;
  std::shared_ptr<const Table> table_;
};

} // namespace wavemap
