#include <wavemap/diagnostics.hpp>
#include <wavemap/functionals.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

double cutoff(double x) {
  x = std::abs(x);
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double s = x - 1.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double cutoff_derivative(double x) {
  const double sign = x < 0.0 ? -1.0 : 1.0;
  x = std::abs(x);
  if (x <= 1.0 || x >= 2.0) return 0.0;
  const double s = x - 1.0;
  return -sign * 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double virial_band_constant() { return 1.0 + 30.0 / 16.0; }

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) acc += 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1]);
  return acc;
}

// ∫ (1 - chi_R) psi_t² r dr - ½ ∫ (psi_t² + psi_r² - ell² g²/r²) chi_R' r² dr.
double virial_remainder(const FieldState& s, double R) {
  const RadialGrid& g = *s.grid;
  const double l2 = static_cast<double>(s.ell * s.ell);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = g.cell(i);
    const double rm = g[i] + 0.5 * h;
    if (rm < R) continue;
    const double pr = (s.psi[i + 1] - s.psi[i]) / h;
    const double pt = 0.5 * (s.psidot[i] + s.psidot[i + 1]);
    const double gm = s.target.g(0.5 * (s.psi[i] + s.psi[i + 1]));
    const double x = rm / R;
    acc += (1.0 - cutoff(x)) * pt * pt * rm * h;
    acc -= 0.5 * (pt * pt + pr * pr - l2 * gm * gm / (rm * rm)) * cutoff_derivative(x) / R * rm * rm * h;
  }
  return acc;
}

const SeriesRow& row_at(const EvolutionTrace& trace, double t) {
  auto it = std::lower_bound(trace.series.begin(), trace.series.end(), t,
                             [](const SeriesRow& r, double v) { return r.t < v; });
  if (it == trace.series.end()) return trace.series.back();
  if (it != trace.series.begin() && std::abs((it - 1)->t - t) < std::abs(it->t - t)) --it;
  return *it;
}

double require_t_plus(const EvolutionTrace& trace) {
  const auto tp = trace.t_plus();
  if (!tp) throw std::domain_error("no blow-up diagnosis: trace has no candidate blow-up time");
  return *tp;
}

} // namespace

double virial_pairing(const FieldState& s, double R) {
  const RadialGrid& g = *s.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = g.cell(i);
    const double rm = g[i] + 0.5 * h;
    const double c = cutoff(rm / R);
    if (c == 0.0) break;
    const double pr = (s.psi[i + 1] - s.psi[i]) / h;
    const double pt = 0.5 * (s.psidot[i] + s.psidot[i + 1]);
    acc += c * pt * pr * rm * rm * h;
  }
  return acc;
}

VirialReport virial_check(const EvolutionTrace& trace, double R, double T) {
  if (!(R > 0.0) || !(T > 0.0)) throw std::invalid_argument("virial_check: R and T must be positive");
  const auto& snaps = trace.snapshots;
  const double t0 = snaps.front().t;
  std::size_t end = 0;
  for (std::size_t k = 0; k < snaps.size(); ++k)
    if (std::abs(snaps[k].t - (t0 + T)) <= 1e-9 * std::max(1.0, T)) end = k + 1;
  if (end == 0) throw std::invalid_argument("virial_check: T is not a snapshot time");
  for (std::size_t k = 1; k < end; ++k)
    if (snaps[k].t - snaps[k - 1].t > T / 200.0 * (1.0 + 1e-9))
      throw std::invalid_argument("insufficient sampling: snapshot spacing exceeds T/200");

  VirialReport rep;
  rep.R = R;
  rep.T = T;
  rep.lhs = virial_pairing(snaps[end - 1], R) - virial_pairing(snaps.front(), R);

  std::vector<double> ts, ks;
  for (const auto& row : trace.series) {
    if (row.t > t0 + T + 1e-12) break;
    ts.push_back(row.t);
    ks.push_back(row.E_kinetic);
  }
  rep.kinetic_integral = trapezoid(ts, ks);
  rep.residual = rep.lhs + rep.kinetic_integral;

  std::vector<double> st, ext, rem;
  for (std::size_t k = 0; k < end; ++k) {
    st.push_back(snaps[k].t);
    const double e = R < snaps[k].grid->r_max() ? energy(snaps[k], R, infinity).total : 0.0;
    ext.push_back(e);
    rep.sup_exterior = std::max(rep.sup_exterior, e);
    rem.push_back(virial_remainder(snaps[k], R));
  }
  rep.exterior_correction = virial_band_constant() * trapezoid(st, ext);
  rep.exact_correction = trapezoid(st, rem);
  return rep;
}

std::vector<WindowPoint> self_similar_window(const EvolutionTrace& trace, double lambda_frac) {
  if (!(lambda_frac > 0.0 && lambda_frac <= 1.0))
    throw std::invalid_argument("self_similar_window: lambda_frac must lie in (0, 1]");
  const double tp = require_t_plus(trace);
  std::vector<WindowPoint> out;
  for (const auto& s : trace.snapshots) {
    const double rho = tp - s.t;
    if (!(rho > 0.0)) break;
    const double a = lambda_frac * rho;
    const double b = std::min(rho, s.grid->r_max());
    out.push_back({s.t, b > a ? energy(s, a, b).total : 0.0});
  }
  return out;
}

double cone_kinetic(const FieldState& s, double t_plus) {
  const double rho = std::min(t_plus - s.t, s.grid->r_max());
  if (!(rho > 0.0)) return 0.0;
  return energy(s, 0.0, rho).kinetic;
}

double averaged_kinetic_cone(const EvolutionTrace& trace, double t, double t_plus) {
  if (!(t < t_plus)) throw std::invalid_argument("averaged_kinetic_cone: t must precede T+");
  std::vector<double> ts, ks;
  for (const auto& s : trace.snapshots) {
    if (s.t < t - 1e-12) continue;
    ts.push_back(s.t);
    ks.push_back(cone_kinetic(s, t_plus));
  }
  return trapezoid(ts, ks) / (t_plus - t);
}

double averaged_kinetic_cone(const EvolutionTrace& trace, double t) {
  return averaged_kinetic_cone(trace, t, require_t_plus(trace));
}

double SelectionSchedule::threshold(std::size_t n) const {
  return theta0 / std::pow(static_cast<double>(n), power);
}

std::vector<SelectedTime> select_times(const EvolutionTrace& trace, const SelectionSchedule& schedule) {
  const double tp = require_t_plus(trace);
  const auto& snaps = trace.snapshots;
  // Suffix trapezoid sums of the cone kinetic energy give every average in
  // one pass.
  std::vector<double> k(snaps.size()), tail(snaps.size(), 0.0);
  for (std::size_t i = 0; i < snaps.size(); ++i) k[i] = cone_kinetic(snaps[i], tp);
  for (std::size_t i = snaps.size() - 1; i-- > 0;)
    tail[i] = tail[i + 1] + 0.5 * (snaps[i + 1].t - snaps[i].t) * (k[i] + k[i + 1]);

  std::vector<SelectedTime> out;
  std::size_t n = 1;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const double t = snaps[i].t;
    if (!(t < tp)) break;
    const double avg = tail[i] / (tp - t);
    const double theta = schedule.threshold(n);
    const double lam = row_at(trace, t).lambda;
    if (avg < theta && k[i] < theta && std::isfinite(lam) && lam < tp - t) {
      out.push_back({i, t, avg, k[i]});
      ++n;
    }
  }
  return out;
}

} // namespace wavemap
