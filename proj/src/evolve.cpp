#include <wavemap/evolve.hpp>
#include <wavemap/functionals.hpp>
#include <wavemap/io.hpp>
#include <wavemap/stencil.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wavemap {

std::string to_string(Formulation f) {
  return f == Formulation::psi_form ? "psi_form" : "reduced_4d";
}

std::string to_string(StopReason r) {
  switch (r) {
  case StopReason::completed: return "completed";
  case StopReason::blowup_underresolved: return "blowup_underresolved";
  case StopReason::gradient_blowup: return "gradient_blowup";
  case StopReason::boundary_contact: return "boundary_contact";
  }
  return "unknown";
}

std::string to_string(TPlusRule r) { return r == TPlusRule::two_lambda ? "two_lambda" : "power_fit"; }

TPlusRule parse_t_plus_rule(const std::string& s) {
  if (s == "two_lambda") return TPlusRule::two_lambda;
  if (s == "power_fit") return TPlusRule::power_fit;
  throw std::invalid_argument("unknown t_plus rule '" + s + "'");
}

Formulation parse_formulation(const std::string& s) {
  if (s == "psi_form") return Formulation::psi_form;
  if (s == "reduced_4d") return Formulation::reduced_4d;
  throw std::invalid_argument("unknown formulation '" + s + "'");
}

StopReason parse_stop_reason(const std::string& s) {
  for (auto r : {StopReason::completed, StopReason::blowup_underresolved, StopReason::gradient_blowup,
                 StopReason::boundary_contact})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown stop reason '" + s + "'");
}

void SolverConfig::validate() const {
  if (!(dr > 0.0)) throw std::invalid_argument("SolverConfig: dr must be positive");
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("SolverConfig: cfl must lie in (0, 1)");
  if (!(t_final > 0.0)) throw std::invalid_argument("SolverConfig: t_final must be positive");
  if (snapshot_stride == 0) throw std::invalid_argument("SolverConfig: snapshot_stride must be positive");
  if (!(support_radius >= 0.0)) throw std::invalid_argument("SolverConfig: support_radius must be >= 0");
  if (r_max < t_final + support_radius)
    throw std::invalid_argument("SolverConfig: r_max must be at least t_final + support_radius");
  if (!(stop.min_lambda_cells >= 0.0) || !(stop.max_gradient_factor > 0.0))
    throw std::invalid_argument("SolverConfig: bad stop rule");
}

namespace {

// Least-squares fit of ln lambda = ln A + p ln(T - t) for fixed T; returns
// the residual sum of squares.
double power_residual(const std::vector<double>& t, const std::vector<double>& log_lam, double T) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = std::log(T - t[i]);
    sx += x;
    sy += log_lam[i];
    sxx += x * x;
    sxy += x * log_lam[i];
  }
  const double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - p * sx) / n;
  double sse = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = log_lam[i] - a - p * std::log(T - t[i]);
    sse += e * e;
  }
  return sse;
}

} // namespace

std::optional<double> EvolutionTrace::t_plus() const {
  if (!blew_up() || series.empty() || !std::isfinite(series.back().lambda)) return std::nullopt;
  const double lam_stop = series.back().lambda;
  const double two_lambda = t_end + 2.0 * lam_stop;
  if (config.t_plus_rule == TPlusRule::two_lambda) return two_lambda;

  std::vector<double> t, log_lam;
  for (const auto& row : series)
    if (std::isfinite(row.lambda) && row.lambda <= 10.0 * lam_stop) {
      t.push_back(row.t);
      log_lam.push_back(std::log(row.lambda));
    }
  if (t.size() < 8) return two_lambda;
  // Golden-section search; the residual is unimodal in T in practice.
  double lo = t_end + 1e-3 * lam_stop, hi = t_end + 1000.0 * lam_stop;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = power_residual(t, log_lam, x1), f2 = power_residual(t, log_lam, x2);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = power_residual(t, log_lam, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = power_residual(t, log_lam, x2);
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

constexpr std::size_t boundary_band = 5;
constexpr double boundary_tol = 1e-6;

// (sin 2x - 2x) / (2x³), with its Taylor series near 0.
double reduced_kernel(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 1e-2) return -2.0 / 3.0 + x2 * (2.0 / 15.0 - x2 * (4.0 / 315.0));
  return (std::sin(2.0 * x) - 2.0 * x) / (2.0 * x2 * x);
}

// Velocity-Verlet integrator over either formulation; u, v are the
// evolved variables (psi or psi/r).
class Integrator {
public:
  Integrator(const FieldState& data, Formulation form)
      : form_(form), grid_(data.grid), ell_(data.ell), target_(data.target),
        lap_(*data.grid, form == Formulation::psi_form ? 2 : 4, form == Formulation::reduced_4d) {
    const RadialGrid& g = *grid_;
    const std::size_t n = g.size();
    u_.resize(n);
    v_.resize(n);
    a_.resize(n);
    coef_.assign(n, 0.0);
    if (form_ == Formulation::psi_form) {
      u_ = data.psi;
      v_ = data.psidot;
      for (std::size_t i = 1; i < n; ++i) coef_[i] = static_cast<double>(ell_ * ell_) / (g[i] * g[i]);
    } else {
      if (data.target.kind() != TargetKind::sphere || data.ell != 1)
        throw std::invalid_argument("reduced form requires the sphere target with ell = 1");
      if (std::abs(data.psi[0]) > 1e-9) throw std::invalid_argument("reduced form requires psi(0) = 0");
      for (std::size_t i = 1; i < n; ++i) {
        u_[i] = data.psi[i] / g[i];
        v_[i] = data.psidot[i] / g[i];
      }
      // Even extrapolation to the axis.
      const double r1 = g[1] * g[1], r2 = g[2] * g[2];
      u_[0] = (r2 * u_[1] - r1 * u_[2]) / (r2 - r1);
      v_[0] = (r2 * v_[1] - r1 * v_[2]) / (r2 - r1);
    }
    accelerate();
  }

  // Linearized potential bound per node for the stability check.
  double stable_dt() const {
    const RadialGrid& g = *grid_;
    std::vector<double> extra(g.size(), 0.0);
    for (std::size_t i = 1; i < g.size(); ++i)
      extra[i] = form_ == Formulation::psi_form ? coef_[i] : 2.0 / (g[i] * g[i]);
    return lap_.stable_dt(extra);
  }

  void step(double dt) {
    const std::size_t lo = lap_.first(), hi = lap_.last();
    for (std::size_t i = lo; i <= hi; ++i) v_[i] += 0.5 * dt * a_[i];
    for (std::size_t i = lo; i <= hi; ++i) u_[i] += dt * v_[i];
    accelerate();
    for (std::size_t i = lo; i <= hi; ++i) v_[i] += 0.5 * dt * a_[i];
  }

  bool finite() const {
    for (std::size_t i = 0; i < u_.size(); ++i)
      if (!std::isfinite(u_[i]) || !std::isfinite(v_[i])) return false;
    return true;
  }

  FieldState state(double t) const {
    FieldState s;
    s.grid = grid_;
    s.t = t;
    s.ell = ell_;
    s.target = target_;
    if (form_ == Formulation::psi_form) {
      s.psi = u_;
      s.psidot = v_;
    } else {
      const RadialGrid& g = *grid_;
      s.psi.resize(g.size());
      s.psidot.resize(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        s.psi[i] = g[i] * u_[i];
        s.psidot[i] = g[i] * v_[i];
      }
    }
    return s;
  }

private:
  void accelerate() {
    lap_.apply(u_, a_);
    const RadialGrid& g = *grid_;
    const std::size_t lo = lap_.first(), hi = lap_.last();
    if (form_ == Formulation::psi_form) {
      for (std::size_t i = lo; i <= hi; ++i) a_[i] -= coef_[i] * target_.f(u_[i]);
    } else {
      for (std::size_t i = lo; i <= hi; ++i) {
        const double u = u_[i];
        a_[i] -= u * u * u * reduced_kernel(g[i] * u);
      }
    }
  }

  Formulation form_;
  GridPtr grid_;
  int ell_;
  TargetGeometry target_;
  RadialLaplacian lap_;
  std::vector<double> u_, v_, a_, coef_;
};

void check_grid(const FieldState& data, const SolverConfig& config) {
  const RadialGrid& g = *data.grid;
  if (std::abs(g.h_min() - config.dr) > 1e-9 * config.dr)
    throw std::invalid_argument("evolve: data grid spacing does not match config.dr");
  if (std::abs(g.r_max() - config.r_max) > 1e-9 * config.r_max)
    throw std::invalid_argument("evolve: data grid r_max does not match config.r_max");
}

SeriesRow measure(const FieldState& s, const SolverConfig& config, double level) {
  SeriesRow row;
  row.t = s.t;
  const EnergyReport e = energy(s);
  row.E_total = e.total;
  row.E_kinetic = e.kinetic;
  row.E_cone = std::numeric_limits<double>::quiet_NaN();
  if (config.t_plus) {
    const double b = std::min(*config.t_plus - s.t, s.grid->r_max());
    row.E_cone = b > 0.0 ? energy(s, 0.0, b).total : 0.0;
  }
  const auto lam = half_energy_scale(s, level);
  row.lambda = lam ? *lam : std::numeric_limits<double>::quiet_NaN();
  row.max_psi = pointwise_bound(s);
  row.max_psir = max_gradient(*s.grid, s.psi);
  return row;
}

EvolutionTrace run(const FieldState& data, const SolverConfig& config) {
  config.validate();
  data.validate();
  check_grid(data, config);

  Integrator integ(data, config.formulation);
  if (config.dt() > integ.stable_dt())
    throw std::invalid_argument("evolve: time step violates the stability limit");

  EvolutionTrace trace;
  trace.config = config;
  const double level = 0.5 * data.target.ground_state_energy(data.ell);
  const auto n_steps = static_cast<std::size_t>(std::ceil(config.t_final / config.dt() - 1e-9));
  const double dt = config.t_final / static_cast<double>(n_steps);
  const std::size_t n = data.size();

  FieldState current = integ.state(data.t);
  SeriesRow row = measure(current, config, level);
  const double e0 = row.E_total;
  const double e_scale = e0 != 0.0 ? std::abs(e0) : 1.0;
  trace.series.push_back(row);
  trace.snapshots.push_back(current);

  for (std::size_t k = 1; k <= n_steps; ++k) {
    integ.step(dt);
    const double t = data.t + static_cast<double>(k) * dt;
    if (!integ.finite()) {
      trace.stop_reason = StopReason::gradient_blowup;
      break;
    }
    current = integ.state(t);
    row = measure(current, config, level);
    trace.series.push_back(row);
    trace.energy_drift = std::max(trace.energy_drift, std::abs(row.E_total - e0) / e_scale);

    std::optional<StopReason> stop;
    if (std::isfinite(row.lambda) && row.lambda < config.stop.min_lambda_cells * config.dr)
      stop = StopReason::blowup_underresolved;
    else if (row.max_psir > config.stop.max_gradient_factor / config.dr)
      stop = StopReason::gradient_blowup;
    else
      for (std::size_t i = n - boundary_band; i < n; ++i)
        if (std::abs(current.psi[i] - data.psi[i]) > boundary_tol) {
          stop = StopReason::boundary_contact;
          break;
        }
    if (stop || k == n_steps || k % config.snapshot_stride == 0) trace.snapshots.push_back(current);
    if (stop) {
      trace.stop_reason = *stop;
      break;
    }
  }
  trace.t_end = trace.series.back().t;
  return trace;
}

} // namespace

FieldState step(const FieldState& state, double dt, double cfl) {
  state.validate();
  if (!(dt > 0.0) || dt > cfl * state.grid->h_min() * (1.0 + 1e-12))
    throw std::invalid_argument("step: dt violates the CFL condition");
  Integrator integ(state, Formulation::psi_form);
  if (dt > integ.stable_dt()) throw std::invalid_argument("step: dt violates the stability limit");
  integ.step(dt);
  if (!integ.finite()) throw NumericalBlowup("numerical blow-up: non-finite field after step");
  return integ.state(state.t + dt);
}

EvolutionTrace evolve(const FieldState& data, const SolverConfig& config) {
  if (config.formulation == Formulation::reduced_4d) return evolve_reduced(data, config);
  return run(data, config);
}

EvolutionTrace evolve_reduced(const FieldState& data, const SolverConfig& config) {
  SolverConfig c = config;
  c.formulation = Formulation::reduced_4d;
  return run(data, c);
}

double finite_speed_check(const EvolutionTrace& a, const EvolutionTrace& b, double R) {
  const std::size_t n = std::min(a.snapshots.size(), b.snapshots.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const FieldState& sa = a.snapshots[k];
    const FieldState& sb = b.snapshots[k];
    if (sa.size() != sb.size() || std::abs(sa.t - sb.t) > 1e-12)
      throw std::invalid_argument("finite_speed_check: traces are not aligned");
    const double A = R + std::abs(sa.t);
    if (A >= sa.grid->r_max()) continue;
    std::vector<double> dp(sa.size()), dv(sa.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
      dp[i] = sa.psi[i] - sb.psi[i];
      dv[i] = sa.psidot[i] - sb.psidot[i];
    }
    worst = std::max(worst, h_norm(*sa.grid, dp, dv, A, infinity).total());
  }
  return worst;
}

void write_trace(const std::filesystem::path& dir, const EvolutionTrace& trace, std::size_t snapshot_every) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "series.csv");
    if (!out) throw std::runtime_error("cannot write series.csv in " + dir.string());
    out << "t,E_total,E_cone,lambda,max_psi,max_psir\n";
    for (const auto& r : trace.series)
      out << format_double(r.t) << ',' << format_double(r.E_total) << ',' << format_double(r.E_cone) << ','
          << format_double(r.lambda) << ',' << format_double(r.max_psi) << ',' << format_double(r.max_psir)
          << '\n';
  }
  const std::size_t n = trace.snapshots.size();
  if (snapshot_every > 0)
    for (std::size_t k = 0; k < n; ++k)
      if (k % snapshot_every == 0 || k + 1 == n) write_snapshot(dir / ("snap_" + std::to_string(k)), trace.snapshots[k]);

  const SolverConfig& c = trace.config;
  nlohmann::ordered_json cfg;
  cfg["dr"] = c.dr;
  cfg["cfl"] = c.cfl;
  cfg["t_final"] = c.t_final;
  cfg["r_max"] = c.r_max;
  cfg["snapshot_stride"] = c.snapshot_stride;
  cfg["stop"] = {{"min_lambda_cells", c.stop.min_lambda_cells},
                 {"max_gradient_factor", c.stop.max_gradient_factor}};
  cfg["formulation"] = to_string(c.formulation);
  cfg["support_radius"] = c.support_radius;
  if (c.t_plus) cfg["t_plus"] = *c.t_plus;
  cfg["t_plus_rule"] = to_string(c.t_plus_rule);
  nlohmann::ordered_json summary;
  summary["stop_reason"] = to_string(trace.stop_reason);
  summary["t_end"] = trace.t_end;
  summary["energy_drift"] = trace.energy_drift;
  if (const auto tp = trace.t_plus()) summary["t_plus"] = *tp;
  summary["config"] = cfg;
  std::ofstream out(dir / "summary.json");
  if (!out) throw std::runtime_error("cannot write summary.json in " + dir.string());
  out << summary.dump(2) << '\n';
}

} // namespace wavemap
