#include "synthetic.hpp"

#include <wavemap/builders.hpp>
#include <wavemap/modulation.hpp>

#include <boost/math/tools/roots.hpp>

#include <doctest.h>

using namespace wavemap;
using namespace test_support;

TEST_SUITE("modulation") {

TEST_CASE("exact bubbles are fitted at their scale") {
  const auto grid = uniform_grid(2.5e-4, 60.0);
  for (double lambda : {1.0, 3.0}) {
    const ModulationFit f = fit_scale(ground_state(1, TargetGeometry::sphere(), lambda).sample(grid));
    CHECK(f.lambda == doctest::Approx(lambda).epsilon(1e-8));
    CHECK(f.distance_H < 1e-6);
    CHECK(std::abs(f.excess_alpha) < 1e-4);
  }
  CHECK_THROWS_AS(fit_scale(FieldState::zero(grid)), std::domain_error);
}

TEST_CASE("fitted scale and distance against quadrature oracles") {
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere());
  auto psi = [&](double r) { return q(r) + 0.05 * r * std::exp(-r * r); };
  auto psi_r = [&](double r) { return q.derivative(r) + 0.05 * (1.0 - 2.0 * r * r) * std::exp(-r * r); };
  auto density = [&](double r) {
    if (r == 0.0) return 0.0;
    const double s = std::sin(psi(r));
    return (psi_r(r) * psi_r(r) + s * s / (r * r)) * r;
  };
  // Independent half-energy scale: E_0^lambda = 2 by root finding on the oracle.
  std::uintmax_t iters = 100;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      [&](double l) { return integrate(density, 0.0, l) - 2.0; }, 0.5, 2.0, boost::math::tools::eps_tolerance<double>(50), iters);
  const double lambda_oracle = 0.5 * (lo + hi);

  const auto grid = uniform_grid(2.5e-4, 300.0);
  const ModulationFit f = fit_scale(FieldState::sample(grid, psi, [](double) { return 0.0; }));
  CHECK(f.lambda == doctest::Approx(lambda_oracle).epsilon(1e-6));

  auto diff = [&](double r) { return psi(r) - q(r / f.lambda); };
  auto diff_r = [&](double r) { return psi_r(r) - q.derivative(r / f.lambda) / f.lambda; };
  const double h2 = integrate([&](double r) { return r == 0.0 ? 0.0 : (diff_r(r) * diff_r(r) + diff(r) * diff(r) / (r * r)) * r; }, 0.0, 300.0);
  CHECK(f.distance_H == doctest::Approx(std::sqrt(h2)).epsilon(1e-4));
}

TEST_CASE("coercivity curve orders distances by the energy excess") {
  const auto grid = uniform_grid(1e-3, 300.0);
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere());
  std::vector<FieldState> family;
  for (double a : {0.1, 0.0, 0.05, 0.02})
    family.push_back(FieldState::sample(
        grid, [&](double r) { return q(r) + a * r * r * std::exp(-r * r); }, [](double) { return 0.0; }));
  const auto curve = coercivity_curve(family);
  REQUIRE(curve.size() == 4);
  CHECK(curve.front().distance < 1e-6);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].alpha > curve[k - 1].alpha);
    CHECK(curve[k].distance > curve[k - 1].distance);
  }
  CHECK_THROWS(coercivity_curve({FieldState::zero(grid)}));
}

TEST_CASE("radiation cap") {
  const auto grid = uniform_grid(1e-2, 400.0);
  const FieldState q = ground_state(1, TargetGeometry::sphere()).sample(grid);
  const RadiationCap cap = extract_radiation_data(q, 100.0);
  CHECK(cap.cap_energy < 1e-2);
  CHECK(classify_degree(cap.data) == Degree{1, 1});
  CHECK_THROWS_AS(extract_radiation_data(q, 1.0), std::domain_error);

  const FieldState flat = FieldState::sample(
      grid, [](double r) { return pi * (1.0 - smooth_cutoff(r, 1.0, 2.0)); }, [](double) { return 0.0; });
  const RadiationCap c2 = extract_radiation_data(flat, 3.0);
  CHECK(c2.cap_energy < 1e-12);
}

TEST_CASE("subtracting an exact decomposition leaves no remainder") {
  const auto grid = uniform_grid(1e-3, 40.0);
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere());
  const FieldState radiation = FieldState::sample(
      grid, [](double r) { return 0.3 * r * r * std::exp(-(r - 5.0) * (r - 5.0)); }, [](double r) { return 0.1 * r * std::exp(-r); });
  FieldState psi = radiation;
  for (std::size_t i = 0; i < grid->size(); ++i) psi.psi[i] += q((*grid)[i] / 0.2);
  ModulationFit fit;
  fit.lambda = 0.2;
  const Remainder rem = subtract_bubble(psi, fit, radiation);
  CHECK(rem.norm.total() < 1e-10);
  CHECK(std::abs(rem.energy) < 1e-10);
}

TEST_CASE("bubbling extraction on an exactly shrinking bubble") {
  const EvolutionTrace trace = shrinking_bubble_trace(2.5e-4, 10.0, 0.9, 0.02);
  REQUIRE(trace.t_plus());
  CHECK(*trace.t_plus() == doctest::Approx(1.0).epsilon(1e-6));
  const BubblingReport rep = bubbling_extract(trace);
  REQUIRE(rep.points.size() >= 3);
  CHECK(rep.ratio_strictly_decreasing);
  CHECK(rep.points.back().ratio < 0.11);
  for (const auto& p : rep.points) {
    CHECK(p.sign == 1);
    CHECK(p.lambda == doctest::Approx((1.0 - p.t) * (1.0 - p.t)).epsilon(1e-3));
    CHECK(p.distance < 5e-4);
  }
}

TEST_CASE("energy near-additivity of separated bubbles") {
  const auto grid = share(RadialGrid::stretched(1e-3, 5.0, 1.01, 1e3, 1e9));
  auto pair = [&](double separation) {
    const HarmonicProfile inner = ground_state(1, TargetGeometry::sphere());
    const HarmonicProfile outer = ground_state(1, TargetGeometry::sphere(), separation);
    FieldState a = inner.sample(grid);
    FieldState b = outer.sample(grid);
    for (double& v : b.psi) v = -v;
    return energy_near_additivity({{a, 1.0}, {b, separation}});
  };
  const auto single = energy_near_additivity({{ground_state(1, TargetGeometry::sphere()).sample(grid), 1.0}});
  CHECK(single.defect == 0.0);
  const auto near = pair(1e4), far = pair(1e6);
  CHECK(near.defect < 2e-2);
  CHECK(far.defect < 2e-3);
  CHECK(far.defect < near.defect);
  CHECK_THROWS_AS(pair(10.0), std::invalid_argument);
}

} // TEST_SUITE
