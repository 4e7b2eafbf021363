#include "support.hpp"

#include <wavemap/functionals.hpp>
#include <wavemap/harmonic.hpp>
#include <wavemap/io.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace wavemap;
using namespace test_support;

TEST_SUITE("core") {

TEST_CASE("grid construction") {
  const RadialGrid u = RadialGrid::uniform_spacing(0.25, 2.0);
  CHECK(u.size() == 9);
  CHECK(u.is_uniform());
  CHECK(u.locate(0.3) == 1);
  CHECK(u.locate(5.0) == 7);
  CHECK_THROWS_AS(RadialGrid::uniform_spacing(0.3, 1.0), std::invalid_argument);

  const RadialGrid s = RadialGrid::stretched(0.01, 1.0, 1.05, 0.5, 50.0);
  CHECK(s[100] == doctest::Approx(1.0));
  CHECK(s.r_max() == 50.0);
  CHECK(s.h_min() == doctest::Approx(0.01));
  for (std::size_t i = 101; i + 2 < s.size(); ++i) {
    CHECK(s.cell(i) >= s.cell(i - 1) * (1.0 - 1e-12));
    CHECK(s.cell(i) <= 0.5 + 1e-12);
  }
}

TEST_CASE("target geometry") {
  const TargetGeometry sphere = TargetGeometry::sphere();
  CHECK(sphere.c_star() == pi);
  CHECK(sphere.ground_state_energy(1) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(sphere.ground_state_energy(2) == doctest::Approx(8.0).epsilon(1e-12));
  const TargetGeometry ym = TargetGeometry::yang_mills();
  CHECK(ym.lower_vacuum() == -1.0);
  CHECK(ym.c_star() == 1.0);
  // 2 ∫_{-1}^{1} (1 - x²)/2 dx = 4/3.
  CHECK(ym.ground_state_energy(1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS(TargetGeometry::from_name("torus"));

  std::vector<double> samples(201);
  for (std::size_t k = 0; k < samples.size(); ++k) samples[k] = std::sin(pi * k / 200.0);
  samples.back() = 0.0;
  const TargetGeometry table = TargetGeometry::custom(samples, pi);
  for (double x : {0.3, 1.1, 2.9, -0.7, 4.0})
    CHECK(table.g(x) == doctest::Approx(std::sin(x)).epsilon(1e-4));
}

TEST_CASE("G accumulation") {
  const TargetGeometry sphere = TargetGeometry::sphere();
  CHECK(G_accumulate(sphere, pi) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(G_accumulate(sphere, 0.0) == 0.0);
  CHECK(G_accumulate(sphere, pi / 2) == doctest::Approx(1.0).epsilon(1e-13));
  // |g| is integrated, so G keeps growing past C*.
  CHECK(G_accumulate(sphere, 2 * pi) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(G_accumulate(sphere, -pi / 2) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("ground-state energy and half-energy normalization") {
  const auto grid = uniform_grid(5e-4, 200.0);
  const FieldState q = ground_state(1, TargetGeometry::sphere()).sample(grid);
  CHECK(energy(q).total == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(energy(q, 0.0, 1.0).total == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(energy(FieldState::zero(grid)).total == 0.0);
  const auto lambda = half_energy_scale(q, 2.0);
  REQUIRE(lambda);
  CHECK(*lambda == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("energy of r e^{-r^2} against an adaptive quadrature oracle") {
  auto psi = [](double r) { return r * std::exp(-r * r); };
  auto psi_r = [](double r) { return (1.0 - 2.0 * r * r) * std::exp(-r * r); };
  const double oracle = integrate(
      [&](double r) {
        if (r == 0.0) return 0.0;
        const double s = std::sin(psi(r));
        return (psi_r(r) * psi_r(r) + s * s / (r * r)) * r;
      },
      0.0, 12.0);
  const auto grid = uniform_grid(1e-4, 12.0);
  const FieldState state = FieldState::sample(grid, psi, [](double) { return 0.0; });
  CHECK(std::abs(energy(state).total - oracle) < 1e-8);
}

TEST_CASE("energy is additive over adjacent intervals") {
  auto g = rng(11);
  const auto grid = uniform_grid(1e-2, 10.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = uniform(g, 0.2, 3.0), s = uniform(g, 0.3, 2.0), v = uniform(g, -1.0, 1.0);
    const FieldState st = FieldState::sample(
        grid, [&](double r) { return a * r * std::exp(-r * r / s); }, [&](double r) { return v * std::exp(-r * r); });
    const double m1 = uniform(g, 0.0, 5.0), m2 = uniform(g, 5.0, 10.0);
    const double whole = energy(st, 0.0, 10.0).total;
    const double parts = energy(st, 0.0, m1).total + energy(st, m1, m2).total + energy(st, m2, 10.0).total;
    CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
    CHECK(energy(st).kinetic >= 0.0);
  }
}

TEST_CASE("energy is scale invariant") {
  const auto grid = uniform_grid(1e-3, 60.0);
  const auto profile = [](double r) { return 1.5 * r * r * std::exp(-r * r); };
  const double base = energy(FieldState::sample(grid, profile, [](double) { return 0.0; })).total;
  for (double lambda : {0.5, 2.0, 4.0}) {
    const FieldState scaled =
        FieldState::sample(grid, [&](double r) { return profile(r / lambda); }, [](double) { return 0.0; });
    CHECK(energy(scaled).total == doctest::Approx(base).epsilon(2e-5));
  }
}

TEST_CASE("H norm dominates energy for degree-zero data below threshold") {
  auto g = rng(5);
  const auto grid = uniform_grid(5e-3, 20.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = uniform(g, 0.1, 3.0), s = uniform(g, 0.2, 3.0);
    const FieldState st = FieldState::sample(
        grid, [&](double r) { return a * r * std::exp(-r * r / s); }, [](double) { return 0.0; });
    const double e = energy(st).total;
    if (e >= 8.0) continue;
    // sin² x <= x² makes the potential term no larger than psi²/r².
    CHECK(std::pow(h_norm(st).h, 2) >= e * (1.0 - 1e-12));
  }
}

TEST_CASE("degree classification") {
  const auto grid = uniform_grid(1e-2, 400.0);
  CHECK(classify_degree(ground_state(1, TargetGeometry::sphere()).sample(grid)) == Degree{0, 1});
  CHECK(classify_degree(FieldState::zero(grid)) == Degree{0, 0});
  const FieldState reflected = FieldState::sample(
      grid, [](double r) { return pi - 2.0 * std::atan(r / 0.5); }, [](double) { return 0.0; });
  // psi(0) = pi is not an axis vacuum of an H_0 datum, but the class is (1, 0).
  CHECK(classify_degree(reflected) == Degree{1, 0});
  const FieldState open = FieldState::sample(grid, [](double r) { return 0.5 * r / (1 + r); }, [](double) { return 0.0; });
  CHECK_THROWS_AS(classify_degree(open), std::domain_error);
}

TEST_CASE("Bogomolny split") {
  const auto grid = uniform_grid(1e-3, 400.0);
  const BogomolnySplit q = bogomolny_split(ground_state(1, TargetGeometry::sphere()).sample(grid));
  CHECK(std::abs(q.defect) < 1e-5);
  CHECK(q.topological == doctest::Approx(4.0).epsilon(1e-9));
  const BogomolnySplit z = bogomolny_split(FieldState::zero(grid));
  CHECK(z.kinetic == 0.0);
  CHECK(z.defect == 0.0);
  CHECK(z.topological == 0.0);
}

TEST_CASE("variational lower bound in degree one") {
  auto g = rng(3);
  const auto grid = uniform_grid(2e-3, 200.0);
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere());
  for (int trial = 0; trial < 12; ++trial) {
    const double lambda = uniform(g, 0.3, 3.0), a = uniform(g, -0.5, 0.5), v = uniform(g, -2.0, 2.0);
    const FieldState st = FieldState::sample(
        grid, [&](double r) { return q(r / lambda) + a * r * r * std::exp(-r * r); },
        [&](double r) { return v * r * std::exp(-r * r); });
    REQUIRE(classify_degree(st) == Degree{0, 1});
    const EnergyReport e = energy(st);
    CHECK(e.total - e.kinetic >= 4.0 - 1e-5);
  }
}

TEST_CASE("G bound on random profiles") {
  auto g = rng(17);
  const auto grid = uniform_grid(2e-3, 12.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = uniform(g, 0.2, 6.0), s = uniform(g, 0.3, 3.0), b = uniform(g, -2.0, 2.0);
    const FieldState st = FieldState::sample(
        grid, [&](double r) { return a * r * std::exp(-r * r / s) + b * r * r * std::exp(-r * r); },
        [](double) { return 0.0; });
    const std::vector<double> cumulative = static_energy_profile(st);
    for (std::size_t i = 0; i < grid->size(); i += 37) {
      const double lhs = 2.0 * std::abs(G_accumulate(st.target, st.psi[i]));
      CHECK(lhs <= cumulative[i] + 1e-6);
    }
  }
}

TEST_CASE("cumulative static energy matches interval energies") {
  const auto grid = uniform_grid(1e-2, 10.0);
  const FieldState st = FieldState::sample(grid, [](double r) { return 2.0 * r * std::exp(-r); }, [](double) { return 1.0; });
  const std::vector<double> c = static_energy_profile(st);
  for (std::size_t i : {std::size_t{1}, std::size_t{250}, grid->size() - 1})
    CHECK(c[i] == doctest::Approx(static_energy(st, 0.0, (*grid)[i])).epsilon(1e-12));
}

TEST_CASE("pointwise bound") {
  const auto grid = uniform_grid(1e-2, 10.0);
  CHECK(pointwise_bound(FieldState::zero(grid)) == 0.0);
  const FieldState st = FieldState::sample(grid, [](double r) { return -2.0 * r * std::exp(-r * r); }, [](double) { return 0.0; });
  CHECK(pointwise_bound(st) == doctest::Approx(2.0 * std::exp(-0.5) / std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("snapshot round trip is exact") {
  const auto grid = uniform_grid(1e-2, 3.0);
  FieldState st = FieldState::sample(grid, [](double r) { return std::sin(r) * r; }, [](double r) { return std::exp(-r) / 3.0; });
  st.t = 0.1 + 0.2;
  const auto dir = std::filesystem::temp_directory_path() / "wavemap_core_test";
  std::filesystem::create_directories(dir);
  write_snapshot(dir / "snap", st);
  const FieldState back = read_snapshot(dir / "snap");
  CHECK(back.t == st.t);
  CHECK(back.psi == st.psi);
  CHECK(back.psidot == st.psidot);
  CHECK(format_double(0.1) == "0.1");
  std::filesystem::remove_all(dir);
}

} // TEST_SUITE
