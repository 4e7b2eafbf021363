#pragma once

#include <wavemap/grid.hpp>
#include <wavemap/target.hpp>

#include <functional>
#include <vector>

namespace wavemap {

/// Sampled Cauchy data (psi, psi_t) of an ell-equivariant map at time t.
struct FieldState {
  GridPtr grid;
  std::vector<double> psi;
  std::vector<double> psidot;
  double t = 0.0;
  int ell = 1;
  TargetGeometry target = TargetGeometry::sphere();

  std::size_t size() const { return psi.size(); }
  double r(std::size_t i) const { return (*grid)[i]; }

  /// Throws std::invalid_argument on size mismatch, non-finite samples or a
  /// non-vacuum axis value.
  void validate() const;

  /// Samples `psi(r)` and `psidot(r)` on the grid.
  static FieldState sample(GridPtr grid, const std::function<double(double)>& psi,
                           const std::function<double(double)>& psidot, int ell = 1,
                           TargetGeometry target = TargetGeometry::sphere());
  static FieldState zero(GridPtr grid, int ell = 1, TargetGeometry target = TargetGeometry::sphere());
};

/// Pointwise combination a*x + b*y of two states on the same grid.
FieldState combine(double a, const FieldState& x, double b, const FieldState& y);

} // namespace wavemap
