#include "support.hpp"

#include <wavemap/builders.hpp>
#include <wavemap/evolve.hpp>
#include <wavemap/functionals.hpp>
#include <wavemap/harmonic.hpp>
#include <wavemap/linear.hpp>

#include <doctest.h>

#include <filesystem>

using namespace wavemap;
using namespace test_support;

namespace {

SolverConfig config_for(double dr, double r_max, double t_final, double support) {
  SolverConfig c;
  c.dr = dr;
  c.r_max = r_max;
  c.t_final = t_final;
  c.support_radius = support;
  c.snapshot_stride = 50;
  return c;
}

double h_distance(const FieldState& a, const FieldState& b) {
  std::vector<double> dp(a.size()), dv(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp[i] = a.psi[i] - b.psi[i];
    dv[i] = a.psidot[i] - b.psidot[i];
  }
  return h_norm(*a.grid, dp, dv).total();
}

} // namespace

TEST_SUITE("evolve") {

TEST_CASE("the ground state is stationary") {
  const auto grid = uniform_grid(5e-3, 20.0);
  const FieldState q = ground_state(1, TargetGeometry::sphere()).sample(grid);
  SolverConfig c = config_for(5e-3, 20.0, 5.0, 0.0);
  const EvolutionTrace trace = evolve(q, c);
  CHECK(trace.stop_reason == StopReason::completed);
  std::vector<double> dp(q.size()), zero(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) dp[i] = trace.snapshots.back().psi[i] - q.psi[i];
  CHECK(h_norm(*grid, dp, zero).h < 1e-4);
  for (const auto& row : trace.series) CHECK(std::abs(row.lambda - 1.0) < 1e-4);

  // Repeated single steps over one time unit; the change is the O(h²) gap
  // between the sampled and the discrete steady state.
  const FieldState fine = ground_state(1, TargetGeometry::sphere()).sample(uniform_grid(1e-3, 5.0));
  FieldState s = fine;
  for (int k = 0; k < 2000; ++k) s = step(s, 5e-4);
  double change = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) change = std::max(change, std::abs(s.psi[i] - fine.psi[i]));
  CHECK(change < 1e-6);
}

TEST_CASE("zero data stays zero") {
  const auto grid = uniform_grid(1e-2, 5.0);
  const EvolutionTrace trace = evolve(FieldState::zero(grid), config_for(1e-2, 5.0, 2.0, 0.0));
  for (const auto& s : trace.snapshots)
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE((s.psi[i] == 0.0 && s.psidot[i] == 0.0));
}

TEST_CASE("configuration and step preconditions") {
  SolverConfig c = config_for(1e-2, 3.0, 2.0, 1.5);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = config_for(1e-2, 5.0, 2.0, 0.0);
  c.cfl = 1.2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const auto grid = uniform_grid(1e-2, 5.0);
  CHECK_THROWS_AS(step(FieldState::zero(grid), 0.9e-2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(evolve(FieldState::zero(uniform_grid(2e-2, 5.0)), c), std::invalid_argument);
}

TEST_CASE("small data follow the linearized flow to third order") {
  const double dr = 2e-3;
  const auto grid = uniform_grid(dr, 8.0);
  double previous = 0.0;
  for (double amp : {0.01, 0.02}) {
    auto f = [&](double r) { return amp * r * std::exp(-r * r); };
    const FieldState data = FieldState::sample(grid, f, [](double) { return 0.0; });
    SolverConfig c = config_for(dr, 8.0, 1.0, 6.0);
    c.snapshot_stride = 1 << 30;
    const FieldState end = evolve(data, c).snapshots.back();
    const LinearState lin = evolve_repulsive_2d(LinearState::sample(grid, 2, f, [](double) { return 0.0; }), 1.0, 0.5);
    std::vector<double> dp(end.size()), dv(end.size());
    for (std::size_t i = 0; i < end.size(); ++i) {
      dp[i] = end.psi[i] - lin.v[i];
      dv[i] = end.psidot[i] - lin.vdot[i];
    }
    const double diff = h_norm(*grid, dp, dv).total();
    const double size = h_norm(*grid, lin.v, lin.vdot).total();
    CHECK(diff / size < 0.1 * amp * amp);
    if (previous > 0.0) CHECK(diff / previous == doctest::Approx(8.0).epsilon(0.05));
    previous = diff;
  }
}

TEST_CASE("the reduced formulation agrees with the psi form") {
  const double dr = 1e-3;
  const auto grid = uniform_grid(dr, 5.0);
  const FieldState data = FieldState::sample(
      grid, [](double r) { return 2.0 * r * std::exp(-r * r); }, [](double r) { return r * std::exp(-r * r); });
  SolverConfig c = config_for(dr, 5.0, 2.0, 3.0);
  c.snapshot_stride = 100;
  const EvolutionTrace a = evolve(data, c);
  c.formulation = Formulation::reduced_4d;
  const EvolutionTrace b = evolve_reduced(data, c);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) worst = std::max(worst, h_distance(a.snapshots[k], b.snapshots[k]));
  CHECK(worst < 5e-4);
}

TEST_CASE("energies agree between formulations on the rate-ansatz seed") {
  const double dr = 1e-3;
  const auto grid = uniform_grid(dr, 4.0);
  const FieldState seed = build_rate_ansatz(grid, 1.0, 0.0);
  SolverConfig c = config_for(dr, 4.0, 0.1, 2.0);
  const EvolutionTrace a = evolve(seed, c);
  c.formulation = Formulation::reduced_4d;
  const EvolutionTrace b = evolve_reduced(seed, c);
  CHECK(energy(b.snapshots.back()).total == doctest::Approx(energy(a.snapshots.back()).total).epsilon(1e-5));
}

TEST_CASE("finite speed of propagation") {
  const double dr = 2e-3;
  const auto grid = uniform_grid(dr, 6.0);
  auto outer = [](double r) { return 0.8 * r * r * std::exp(-(r - 2.0) * (r - 2.0)); };
  const FieldState a = FieldState::sample(grid, outer, [](double) { return 0.0; });
  const FieldState b = FieldState::sample(
      grid, [&](double r) { return outer(r) + 0.5 * r * smooth_cutoff(r, 0.5, 0.9); }, [](double) { return 0.0; });
  SolverConfig c = config_for(dr, 6.0, 2.0, 4.0);
  c.snapshot_stride = 100;
  const EvolutionTrace ta = evolve(a, c), tb = evolve(b, c);
  CHECK(finite_speed_check(ta, ta, 0.0) == 0.0);
  CHECK(finite_speed_check(ta, tb, 1.0) < 1e-6);
  CHECK(finite_speed_check(ta, tb, 0.5) > 0.1);
}

TEST_CASE("degree and energy are preserved on random degree-zero data") {
  auto g = rng(23);
  const double dr = 1e-2;
  const auto grid = uniform_grid(dr, 12.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double a = uniform(g, 0.5, 3.5), s = uniform(g, 0.5, 2.0), v = uniform(g, -1.0, 1.0);
    const FieldState data = FieldState::sample(
        grid, [&](double r) { return a * r * std::exp(-r * r / s); }, [&](double r) { return v * r * std::exp(-r * r); });
    SolverConfig c = config_for(dr, 12.0, 4.0, 6.0);
    c.cfl = 0.05;
    const EvolutionTrace trace = evolve(data, c);
    REQUIRE(trace.stop_reason == StopReason::completed);
    CHECK(trace.energy_drift < 1e-6);
    for (const auto& s_ : trace.snapshots) CHECK(classify_degree(s_) == Degree{0, 0});
  }
}

TEST_CASE("trace output") {
  const auto grid = uniform_grid(1e-2, 5.0);
  SolverConfig c = config_for(1e-2, 5.0, 1.0, 2.0);
  c.snapshot_stride = 20;
  const EvolutionTrace trace =
      evolve(FieldState::sample(grid, [](double r) { return r * std::exp(-r * r); }, [](double) { return 0.0; }), c);
  const auto dir = std::filesystem::temp_directory_path() / "wavemap_trace_test";
  std::filesystem::remove_all(dir);
  write_trace(dir, trace, 3);
  CHECK(std::filesystem::exists(dir / "series.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "snap_0.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "snap_1.csv"));
  CHECK(std::filesystem::exists(dir / ("snap_" + std::to_string(trace.snapshots.size() - 1) + ".csv")));
  std::filesystem::remove_all(dir);
}

} // TEST_SUITE
