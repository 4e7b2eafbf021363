#include <wavemap/builders.hpp>
#include <wavemap/functionals.hpp>
#include <wavemap/harmonic.hpp>

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

double smooth_cutoff(double r, double a, double b) {
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double s = (r - a) / (b - a);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

FieldState build_rate_ansatz(GridPtr grid, double nu, double t0, const RateAnsatzOptions& options) {
  if (!(nu > 0.0)) throw std::invalid_argument("build_rate_ansatz: nu must be positive");
  if (!(t0 >= 0.0 && t0 < 1.0)) throw std::invalid_argument("build_rate_ansatz: t0 must lie in [0, 1)");
  if (!(options.cap_outer > options.cap_inner && options.cap_inner > 0.0))
    throw std::invalid_argument("build_rate_ansatz: need 0 < cap_inner < cap_outer");
  const double lambda = std::pow(1.0 - t0, 1.0 + nu);
  const double rate = -(1.0 + nu) * std::pow(1.0 - t0, nu); // lambda'(t0)
  const HarmonicProfile q = ground_state(options.ell, options.target, lambda);
  return FieldState::sample(
      std::move(grid), [&](double r) { return q(r); },
      [&](double r) {
        return -rate * (r / lambda) * q.derivative(r) * smooth_cutoff(r, options.cap_inner, options.cap_outer);
      },
      options.ell, options.target);
}

std::string to_string(BumpShape s) { return s == BumpShape::ring ? "ring" : "shell"; }

BumpShape parse_bump_shape(const std::string& s) {
  if (s == "ring") return BumpShape::ring;
  if (s == "shell") return BumpShape::shell;
  throw std::invalid_argument("unknown bump shape: " + s);
}

double bump_profile(BumpShape shape, double r) {
  const double e = std::exp(-r * r);
  return shape == BumpShape::ring ? r * e : r * r * e;
}

BelowThresholdData build_below_threshold_family(GridPtr grid, double energy_target, BumpShape shape,
                                                int ell) {
  const TargetGeometry target = TargetGeometry::sphere();
  const double threshold = 2.0 * target.ground_state_energy(ell);
  if (!(energy_target > 0.0 && energy_target < threshold))
    throw std::invalid_argument("build_below_threshold_family: energy target must lie in (0, 2 E(Q))");

  auto make = [&](double a) {
    return FieldState::sample(
        grid, [&](double r) { return target.lower_vacuum() + a * bump_profile(shape, r); },
        [](double) { return 0.0; }, ell, target);
  };
  auto excess = [&](double a) { return energy(make(a)).total - energy_target; };

  // E(A) ~ A² E(1) for small A gives the starting pair.
  double a0 = std::sqrt(energy_target / (excess(1.0) + energy_target));
  double a1 = 1.05 * a0;
  double f0 = excess(a0), f1 = excess(a1);
  for (int it = 0; it < 60 && std::abs(f1) > 1e-8; ++it) {
    if (f1 == f0) break;
    const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
    a0 = a1;
    f0 = f1;
    a1 = a2;
    f1 = excess(a1);
  }
  if (!std::isfinite(a1) || std::abs(f1) > 1e-6)
    throw std::domain_error("build_below_threshold_family: energy target unreachable by the family");

  BelowThresholdData out;
  out.state = make(a1);
  out.amplitude = a1;
  out.energy = f1 + energy_target;
  if (pointwise_bound(out.state) >= target.c_star())
    throw std::domain_error("build_below_threshold_family: family leaves the degree-0 range");
  return out;
}

FieldState glued_inner_datum(GridPtr grid, double scale, double amplitude) {
  const HarmonicProfile q = ground_state(1, TargetGeometry::sphere(), scale);
  return FieldState::sample(
      std::move(grid), [&](double r) { return q(r); },
      [&](double r) {
        const double x = r / scale;
        return amplitude / scale * x * std::exp(-x * x);
      });
}

double solve_glue_scale(double value, double match_radius) {
  const TargetGeometry target = TargetGeometry::sphere();
  if (!(value > 0.0 && value < target.c_star())) throw std::domain_error("unmatchable data: inner(match) outside (0, C*)");
  const HarmonicProfile q = ground_state(1, target, 1.0);
  const double goal = target.c_star() - value;
  auto h = [&](double log_lambda) { return q(match_radius * std::exp(log_lambda)) - goal; };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(h, -40.0, 40.0, boost::math::tools::eps_tolerance<double>(52), iters);
  return std::exp(0.5 * (lo + hi));
}

GluedData build_glued_threshold_data(GridPtr grid, double delta, const GluedOptions& options) {
  if (!(delta > 0.0)) throw std::invalid_argument("build_glued_threshold_data: delta must be positive");
  const double s = options.inner_scale;
  const double m = options.match_radius;
  const double w = options.collar_half_width;
  if (!(s > 0.0 && w > 0.0 && m - w > 6.0 * s))
    throw std::invalid_argument("build_glued_threshold_data: collar must sit outside the inner bubble core");
  if (grid->r_max() <= m + w) throw std::invalid_argument("build_glued_threshold_data: grid ends inside the collar");

  // Certification runs on the inner datum alone.
  SolverConfig probe;
  probe.dr = options.probe_dr;
  probe.t_final = options.probe_t_final;
  probe.support_radius = 6.0 * s;
  probe.r_max = probe.dr * std::ceil((probe.t_final + probe.support_radius + 0.5) / probe.dr);
  probe.snapshot_stride = std::size_t{1} << 30;
  const auto probe_grid = share(RadialGrid::uniform_spacing(probe.dr, probe.r_max));
  GluedData out;
  auto blows_up = [&](double a) {
    ++out.certification_runs;
    return evolve(glued_inner_datum(probe_grid, s, a), probe).blew_up();
  };

  double hi = std::sqrt(8.0 * delta);
  if (!blows_up(hi)) throw std::runtime_error("build_glued_threshold_data: no blow-up at the energy cap");
  double lo = 0.0;
  for (std::size_t k = 0; k < options.bisection_steps; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (blows_up(mid)) hi = mid;
    else lo = mid;
  }
  out.kick_amplitude = hi;
  out.inner_energy = energy(glued_inner_datum(probe_grid, s, hi)).total;

  const TargetGeometry target = TargetGeometry::sphere();
  const HarmonicProfile inner_q = ground_state(1, target, s);
  const double inner_at_match = inner_q(m);
  out.lambda_glue = solve_glue_scale(inner_at_match, m);
  const HarmonicProfile outer_q = ground_state(1, target, 1.0 / out.lambda_glue);
  out.matching_residual = std::abs((target.c_star() - outer_q(m)) - inner_at_match);
  if (out.matching_residual > 1e-10) throw std::runtime_error("build_glued_threshold_data: matching residual too large");

  const FieldState inner = glued_inner_datum(grid, s, hi);
  out.state = inner;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double r = (*grid)[i];
    const double blend = smooth_cutoff(r, m - w, m + w);
    out.state.psi[i] = blend * inner.psi[i] + (1.0 - blend) * (target.c_star() - outer_q(r));
    out.state.psidot[i] = blend * inner.psidot[i];
  }
  out.collar_energy = energy(out.state, m - w, m + w).total;
  out.energy = energy(out.state).total;
  return out;
}

} // namespace wavemap
