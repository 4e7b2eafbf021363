#include <wavemap/stencil.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

double radial_measure(int dim, double x, double y) {
  return (std::pow(y, dim) - std::pow(x, dim)) / dim;
}

RadialLaplacian::RadialLaplacian(const RadialGrid& grid, int dim, bool free_axis)
    : dim_(dim), free_axis_(free_axis), w_(grid.size(), 0.0), c_(grid.size() - 1, 0.0) {
  if (dim < 1) throw std::invalid_argument("RadialLaplacian: dimension must be positive");
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = grid.cell(k);
    c_[k] = radial_measure(dim, grid[k], grid[k + 1]) / (h * h);
  }
  for (std::size_t i = 1; i + 1 < n; ++i)
    w_[i] = radial_measure(dim, 0.5 * (grid[i - 1] + grid[i]), 0.5 * (grid[i] + grid[i + 1]));
  const double h0 = grid.cell(0);
  w_[0] = std::pow(h0, dim) / (2.0 * dim * dim);
  w_[n - 1] = radial_measure(dim, 0.5 * (grid[n - 2] + grid[n - 1]), grid[n - 1]);
}

void RadialLaplacian::apply(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = w_.size();
  out[0] = 0.0;
  out[n - 1] = 0.0;
  if (free_axis_) out[0] = c_[0] * (u[1] - u[0]) / w_[0];
  double flux_lo = c_[0] * (u[1] - u[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double flux_hi = c_[i] * (u[i + 1] - u[i]);
    out[i] = (flux_hi - flux_lo) / w_[i];
    flux_lo = flux_hi;
  }
}

double RadialLaplacian::stable_dt(std::span<const double> extra) const {
  double worst = 0.0;
  const std::size_t lo = first(), hi = last();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double cm = i > 0 ? c_[i - 1] : 0.0;
    const double cp = c_[i];
    double row = (cm + cp) / w_[i] + std::abs(extra[i]);
    if (i > lo) row += cm / std::sqrt(w_[i] * w_[i - 1]);
    if (i < hi) row += cp / std::sqrt(w_[i] * w_[i + 1]);
    worst = std::max(worst, row);
  }
  return 2.0 / std::sqrt(worst);
}

double RadialLaplacian::quadratic_energy(std::span<const double> u, std::span<const double> v) const {
  double e = 0.0;
  for (std::size_t i = first(); i <= last(); ++i) e += w_[i] * v[i] * v[i];
  for (std::size_t k = 0; k + 1 < w_.size(); ++k) {
    const double d = u[k + 1] - u[k];
    e += c_[k] * d * d;
  }
  return e;
}

} // namespace wavemap
