#include "support.hpp"

#include <wavemap/functionals.hpp>
#include <wavemap/harmonic.hpp>

#include <doctest.h>

using namespace wavemap;
using namespace test_support;

TEST_SUITE("harmonic") {

TEST_CASE("closed-form corotational ground state") {
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere());
  CHECK(q(1.0) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(q(0.0) == 0.0);
  CHECK(q.derivative(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q.rescaled(3.0)(3.0) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(ground_state(1, TargetGeometry::sphere(), 0.0), std::invalid_argument);
}

TEST_CASE("ell = 2 shooting solution matches 2 arctan(r^2)") {
  const HarmonicProfile q = ground_state(2, TargetGeometry::sphere());
  CHECK(q(1.0) == doctest::Approx(pi / 2).epsilon(1e-10));
  for (double r : {0.05, 0.3, 0.8, 1.7, 4.0, 20.0}) {
    CHECK(std::abs(q(r) - 2.0 * std::atan(r * r)) < 1e-8);
    CHECK(std::abs(q.derivative(r) - 4.0 * r / (1.0 + std::pow(r, 4))) < 1e-7);
  }
}

TEST_CASE("ground-state energy is independent of the scale") {
  const auto grid = uniform_grid(5e-4, 400.0);
  for (double lambda : {0.5, 1.0, 2.0}) {
    const FieldState q = ground_state(1, TargetGeometry::sphere(), lambda).sample(grid);
    CHECK(energy(q).total == doctest::Approx(4.0).epsilon(2e-6));
  }
  const FieldState q2 = ground_state(2, TargetGeometry::sphere()).sample(grid);
  CHECK(energy(q2).total == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("Yang-Mills ground state") {
  const TargetGeometry ym = TargetGeometry::yang_mills();
  const HarmonicProfile q = ground_state(1, ym);
  CHECK(q(1e-6) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(q(1e6) == doctest::Approx(1.0).epsilon(1e-6));
  // r Q_r = (1 - Q²)/2 integrates to Q = (r - 1)/(r + 1).
  for (double r = 1e-4; r < 1e4; r *= 1.37) {
    CHECK(std::abs(q(r) - (r - 1.0) / (r + 1.0)) < 1e-10);
    CHECK(std::abs(q.derivative(r) - 2.0 / ((r + 1.0) * (r + 1.0))) < 1e-8);
  }
  CHECK(harmonic_residual(q, *uniform_grid(2e-3, 20.0)) < 1e-5);
  const FieldState s = q.sample(uniform_grid(1e-3, 400.0));
  CHECK(energy(s).total == doctest::Approx(4.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("stencil residual") {
  const auto grid = uniform_grid(1e-3, 20.0);
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere());
  CHECK(harmonic_residual(q, *grid) < 1e-5);
  const std::vector<double> zero(grid->size(), 0.0);
  CHECK(harmonic_residual(*grid, zero, 1, TargetGeometry::sphere()) == 0.0);
  std::vector<double> bumped(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) bumped[i] = q((*grid)[i]) + 0.1 * (*grid)[i] * std::exp(-(*grid)[i]);
  CHECK(harmonic_residual(*grid, bumped, 1, TargetGeometry::sphere()) > 1e-2);
}

TEST_CASE("a target with an interior zero is degenerate") {
  std::vector<double> samples(101);
  for (std::size_t k = 0; k < samples.size(); ++k) samples[k] = 0.5 * std::sin(2.0 * pi * k / 100.0);
  samples.back() = 0.0;
  const TargetGeometry t = TargetGeometry::custom(samples, pi);
  CHECK(t.has_interior_zero());
  CHECK_THROWS_AS(ground_state(1, t), std::domain_error);
}

} // TEST_SUITE
