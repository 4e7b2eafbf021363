#include <wavemap/modulation.hpp>
#include <wavemap/diagnostics.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

namespace {

// psi at radius r by linear interpolation.
double sample_at(const FieldState& s, double r) {
  const RadialGrid& g = *s.grid;
  const std::size_t i = g.locate(r);
  const double w = (r - g[i]) / g.cell(i);
  return (1.0 - w) * s.psi[i] + w * s.psi[i + 1];
}

std::vector<double> bubble_samples(const FieldState& s, double lambda, int sign) {
  const HarmonicProfile q = ground_state(s.ell, s.target, lambda);
  // Reflection about the lower vacuum keeps psi(0) fixed for either sign.
  const double v0 = s.target.lower_vacuum();
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = v0 + sign * (q(s.r(i)) - v0);
  return out;
}

double bubble_distance(const FieldState& s, const std::vector<double>& bubble, double a, double b) {
  std::vector<double> d(s.size()), z(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) d[i] = s.psi[i] - bubble[i];
  return h_norm(*s.grid, d, z, a, b).h;
}

} // namespace

ModulationFit fit_scale(const FieldState& state) {
  state.validate();
  if (std::abs(state.psi[0] - state.target.lower_vacuum()) > 1e-9)
    throw std::domain_error("fit_scale: psi(0) must sit at the lower vacuum");
  const double eq = state.target.ground_state_energy(state.ell);
  const auto lam = half_energy_scale(state, 0.5 * eq);
  if (!lam) throw std::domain_error("insufficient interior energy: E_0^r_max(psi, 0) <= E(Q)/2");

  ModulationFit fit;
  fit.lambda = *lam;
  const int sign = sample_at(state, fit.lambda) < state.target.lower_vacuum() ? -1 : 1;
  const auto bubble = bubble_samples(state, fit.lambda, sign);
  fit.distance_H = bubble_distance(state, bubble, 0.0, infinity);
  FieldState diff = state;
  for (std::size_t i = 0; i < state.size(); ++i) diff.psi[i] = state.psi[i] - bubble[i];
  // The difference leaves the target's vacuum structure only for the sphere;
  // other targets report the quadratic energy of the difference.
  if (state.target.kind() == TargetKind::sphere) {
    fit.remainder_energy = energy(diff, 0.0, state.grid->r_max()).total;
  } else {
    const HNorm n = h_norm(diff);
    fit.remainder_energy = n.h * n.h + n.l2 * n.l2;
  }
  fit.excess_alpha = static_energy(state) - eq;
  return fit;
}

std::vector<CoercivityPoint> coercivity_curve(const std::vector<FieldState>& family) {
  std::vector<CoercivityPoint> out;
  out.reserve(family.size());
  for (const auto& s : family) {
    const Degree d = classify_degree(s);
    if (d.m != 0 || d.n != 1) throw std::invalid_argument("coercivity_curve: states must have degree (0,1)");
    const ModulationFit f = fit_scale(s);
    out.push_back({f.excess_alpha, f.distance_H, f.lambda});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CoercivityPoint& a, const CoercivityPoint& b) { return a.alpha < b.alpha; });
  return out;
}

RadiationCap extract_radiation_data(const FieldState& state, double r_n) {
  const RadialGrid& g = *state.grid;
  if (!(r_n > 0.0) || r_n >= g.r_max()) throw std::invalid_argument("extract_radiation_data: r_n out of range");
  const double c = state.target.upper_vacuum();
  const double edge = sample_at(state, r_n);
  if (std::abs(c - edge) > 0.5) throw std::domain_error("cap too energetic: |C* - psi(r_n)| > 0.5");
  RadiationCap cap;
  cap.r_n = r_n;
  cap.data = state;
  for (std::size_t i = 0; i < g.size() && g[i] <= r_n; ++i) {
    cap.data.psi[i] = c - (c - edge) / r_n * g[i];
    cap.data.psidot[i] = 0.0;
  }
  cap.cap_energy = energy(cap.data, 0.0, r_n).total;
  return cap;
}

Remainder subtract_bubble(const FieldState& state, const ModulationFit& fit, const FieldState& radiation) {
  if (radiation.size() != state.size()) throw std::invalid_argument("subtract_bubble: grid mismatch");
  const int sign = sample_at(state, fit.lambda) < state.target.lower_vacuum() ? -1 : 1;
  const auto bubble = bubble_samples(state, fit.lambda, sign);
  Remainder rem;
  rem.epsilon = state;
  for (std::size_t i = 0; i < state.size(); ++i) {
    rem.epsilon.psi[i] = state.psi[i] - radiation.psi[i] - bubble[i];
    rem.epsilon.psidot[i] = state.psidot[i] - radiation.psidot[i];
  }
  rem.norm = h_norm(rem.epsilon);
  rem.energy = energy(rem.epsilon, 0.0, state.grid->r_max()).total;
  return rem;
}

BubblingReport bubbling_extract(const EvolutionTrace& trace, const BubblingOptions& options) {
  const auto times = select_times(trace, {options.theta0, options.power});
  if (times.empty()) throw std::domain_error("no bubbling certificate: no qualifying times");
  BubblingReport rep;
  rep.t_plus = *trace.t_plus();
  for (const auto& sel : times) {
    const FieldState& s = trace.snapshots[sel.snapshot];
    BubblingPoint p;
    p.snapshot = sel.snapshot;
    p.t = s.t;
    p.lambda = fit_scale(s).lambda;
    p.ratio = p.lambda / (rep.t_plus - p.t);
    p.window = std::min(std::sqrt(p.lambda), rep.t_plus - p.t);
    p.distance_plus = bubble_distance(s, bubble_samples(s, p.lambda, +1), 0.0, p.window);
    p.distance_minus = bubble_distance(s, bubble_samples(s, p.lambda, -1), 0.0, p.window);
    p.sign = p.distance_plus <= p.distance_minus ? 1 : -1;
    p.distance = std::min(p.distance_plus, p.distance_minus);
    rep.points.push_back(p);
  }
  rep.ratio_strictly_decreasing = true;
  for (std::size_t k = 1; k < rep.points.size(); ++k)
    if (!(rep.points[k].ratio < rep.points[k - 1].ratio)) rep.ratio_strictly_decreasing = false;
  return rep;
}

RemainderReport remainder_sequence(const EvolutionTrace& trace, const BubblingReport& bubbling,
                                   const RadiationOptions& options) {
  if (bubbling.points.empty()) throw std::invalid_argument("remainder_sequence: empty bubbling sequence");
  RemainderReport rep;
  // Reference snapshot: the requested time or the last bubbling time.
  std::size_t ref = bubbling.points.back().snapshot;
  if (options.t_ref >= 0.0) {
    ref = 0;
    for (std::size_t k = 0; k < trace.snapshots.size(); ++k)
      if (trace.snapshots[k].t <= options.t_ref + 1e-12) ref = k;
  }
  const FieldState& at_ref = trace.snapshots[ref];
  rep.t_ref = at_ref.t;
  const double c = at_ref.target.upper_vacuum();
  const double cone = bubbling.t_plus - rep.t_ref;
  if (options.r_ref > 0.0) {
    rep.r_ref = options.r_ref;
  } else {
    const double lam = fit_scale(at_ref).lambda;
    const RadialGrid& g = *at_ref.grid;
    double best = infinity;
    for (std::size_t i = 1; i < g.size() && g[i] <= cone; ++i) {
      if (g[i] < 2.0 * lam) continue;
      const double gap = std::abs(c - at_ref.psi[i]);
      if (gap < best) {
        best = gap;
        rep.r_ref = g[i];
      }
    }
    if (!(rep.r_ref > 0.0)) rep.r_ref = std::min(cone, 2.0 * lam);
  }
  const RadiationCap cap = extract_radiation_data(at_ref, rep.r_ref);
  rep.cap_energy = cap.cap_energy;

  // Time-reversed data: evolving (phi, -phi_t) forward by s gives the
  // backward evolution at t_ref - s with reversed velocity.
  FieldState reversed = cap.data;
  for (double& v : reversed.psidot) v = -v;
  reversed.t = 0.0;
  auto radiation_at = [&](double t) {
    FieldState out = cap.data;
    const double s = rep.t_ref - t;
    if (s > 1e-12) {
      SolverConfig cfg = trace.config;
      cfg.t_final = s;
      cfg.support_radius = 0.0;
      cfg.t_plus.reset();
      cfg.snapshot_stride = 1u << 30;
      cfg.stop.min_lambda_cells = 0.0;
      const EvolutionTrace back = evolve(reversed, cfg);
      if (back.stop_reason != StopReason::completed)
        throw std::runtime_error("remainder_sequence: radiation evolution did not complete");
      out = back.snapshots.back();
      for (double& v : out.psidot) v = -v;
    }
    out.t = t;
    for (double& p : out.psi) p -= c;
    return out;
  };

  const double e_psi = energy(trace.snapshots.front()).total;
  const double e_q = at_ref.target.ground_state_energy(at_ref.ell);
  for (const auto& bp : bubbling.points) {
    if (bp.snapshot > ref) break;
    const FieldState& s = trace.snapshots[bp.snapshot];
    const FieldState rad = radiation_at(s.t);
    if (rep.points.empty()) rep.radiation_energy = energy(rad, 0.0, rad.grid->r_max()).total;
    const ModulationFit fit = fit_scale(s);
    const Remainder r = subtract_bubble(s, fit, rad);
    RemainderPoint p;
    p.t = s.t;
    p.lambda = fit.lambda;
    p.norm = r.norm.total();
    p.energy = r.energy;
    p.energy_defect = e_psi - energy(rad, 0.0, rad.grid->r_max()).total - e_q - r.energy;
    rep.points.push_back(p);
  }
  rep.norm_decreasing = true;
  for (std::size_t k = 1; k < rep.points.size(); ++k)
    if (!(rep.points[k].norm < rep.points[k - 1].norm)) rep.norm_decreasing = false;
  return rep;
}

AdditivityReport energy_near_additivity(const std::vector<ScaledComponent>& components) {
  if (components.empty()) throw std::invalid_argument("energy_near_additivity: no components");
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const double q = components[i].scale / components[j].scale;
      if (std::max(q, 1.0 / q) < 100.0)
        throw std::invalid_argument("energy_near_additivity: scales must be separated by a factor >= 100");
      if (components[i].state.size() != components[j].state.size())
        throw std::invalid_argument("energy_near_additivity: grid mismatch");
    }
  AdditivityReport rep;
  FieldState sum = components.front().state;
  std::fill(sum.psi.begin(), sum.psi.end(), 0.0);
  std::fill(sum.psidot.begin(), sum.psidot.end(), 0.0);
  for (const auto& c : components) {
    rep.sum_of_energies += energy(c.state).total;
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum.psi[i] += c.state.psi[i];
      sum.psidot[i] += c.state.psidot[i];
    }
  }
  rep.energy_of_sum = energy(sum).total;
  rep.defect = std::abs(rep.energy_of_sum - rep.sum_of_energies) / rep.sum_of_energies;
  return rep;
}

} // namespace wavemap
