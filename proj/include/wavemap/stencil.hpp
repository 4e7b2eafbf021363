#pragma once

#include <wavemap/grid.hpp>

#include <span>
#include <vector>

namespace wavemap {

/// Finite-volume radial Laplacian in ambient dimension d,
///   (Lu)_i = (c_{i+1/2}(u_{i+1} - u_i) - c_{i-1/2}(u_i - u_{i-1})) / w_i,
/// with w_i the measure ∫ r^(d-1) dr of the dual cell around r_i and
/// c_{i+1/2} = ∫_cell r^(d-1) dr / h². The quadratic form Σ c (Δu)² is the
/// exact gradient energy of the piecewise-linear interpolant.
///
/// With a free axis the node at r = 0 carries the mass h^d / (2d²), which
/// makes the axis row consistent with d u''(0) for even u. With a pinned
/// axis node 0 is excluded from the dynamics. The outer node is always
/// pinned.
class RadialLaplacian {
public:
  RadialLaplacian(const RadialGrid& grid, int dim, bool free_axis);

  int dim() const { return dim_; }
  bool free_axis() const { return free_axis_; }
  std::size_t size() const { return w_.size(); }
  std::size_t first() const { return free_axis_ ? 0 : 1; }
  std::size_t last() const { return w_.size() - 2; }

  double weight(std::size_t i) const { return w_[i]; }
  double conductance(std::size_t cell) const { return c_[cell]; }

  /// out_i = (Lu)_i on dynamic nodes, 0 on pinned nodes.
  void apply(std::span<const double> u, std::span<double> out) const;

  /// Largest stable leapfrog step for L - diag(extra), from a symmetrized
  /// Gershgorin bound. `extra[i]` bounds the linearized potential at node i.
  double stable_dt(std::span<const double> extra) const;

  /// Σ w_i v_i² + Σ c (Δu)² over dynamic nodes and all cells.
  double quadratic_energy(std::span<const double> u, std::span<const double> v) const;

private:
  int dim_;
  bool free_axis_;
  std::vector<double> w_;
  std::vector<double> c_;
};

/// ∫_x^y r^(d-1) dr.
double radial_measure(int dim, double x, double y);

} // namespace wavemap
