#pragma once

#include <wavemap/field.hpp>

#include <memory>

namespace wavemap {

/// Ground-state harmonic map Q_ell(r/lambda) into a target, the monotone
/// solution of r Q_r = ell g(Q) joining the lower vacuum to C*.
///
/// Sphere with ell = 1 uses 2 arctan(r/lambda). Every other case integrates
/// dQ/ds = ell g(Q) in s = ln r from the midpoint between the vacua at s = 0
/// and interpolates the result with quintic Hermite splines; outside the
/// integrated window the linearized power laws take over.
class HarmonicProfile {
public:
  int ell() const { return ell_; }
  const TargetGeometry& target() const { return target_; }
  double lambda() const { return lambda_; }

  double operator()(double r) const;
  /// dQ/dr.
  double derivative(double r) const;

  /// (Q(r/lambda), 0) sampled on `grid`.
  FieldState sample(GridPtr grid) const;

  /// Same profile at another scale.
  HarmonicProfile rescaled(double lambda) const;

private:
  friend HarmonicProfile ground_state(int ell, const TargetGeometry& target, double lambda);
  struct Table;
  int ell_ = 1;
  TargetGeometry target_;
  double lambda_ = 1.0;
  std::shared_ptr<const Table> table_; // null for the closed form
};

/// Throws std::invalid_argument for lambda <= 0 and std::domain_error
/// ("degenerate target") if g vanishes strictly between the vacua.
HarmonicProfile ground_state(int ell, const TargetGeometry& target, double lambda = 1.0);

/// max over interior nodes of |r² (Q_rr + Q_r/r) - ell² f(Q)| for the
/// sampled profile, using three-point differences.
double harmonic_residual(const HarmonicProfile& profile, const RadialGrid& grid);
double harmonic_residual(const RadialGrid& grid, std::span<const double> psi, int ell,
                         const TargetGeometry& target);

} // namespace wavemap
