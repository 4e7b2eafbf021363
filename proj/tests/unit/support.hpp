#pragma once

#include <wavemap/field.hpp>
#include <wavemap/grid.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace test_support {

inline constexpr double pi = std::numbers::pi;

inline wavemap::GridPtr uniform_grid(double dr, double r_max) {
  return wavemap::share(wavemap::RadialGrid::uniform_spacing(dr, dr * std::ceil(r_max / dr - 1e-9)));
}

/// Adaptive Gauss-Kronrod on [a, b]; the independent oracle for grid quadratures.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

/// Deterministic generator for property tests.
inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

} // namespace test_support
