#include <wavemap/linear.hpp>
#include <wavemap/functionals.hpp>
#include <wavemap/io.hpp>
#include <wavemap/stencil.hpp>

#include <boost/math/special_functions/cardinal_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace wavemap {

LinearState LinearState::sample(GridPtr grid, int dim, const std::function<double(double)>& v,
                                const std::function<double(double)>& vdot) {
  LinearState s;
  s.grid = std::move(grid);
  s.dim = dim;
  s.v.resize(s.grid->size());
  s.vdot.resize(s.grid->size());
  for (std::size_t i = 0; i < s.grid->size(); ++i) {
    s.v[i] = v((*s.grid)[i]);
    s.vdot[i] = vdot((*s.grid)[i]);
  }
  s.validate();
  return s;
}

void LinearState::validate() const {
  if (!grid) throw std::invalid_argument("LinearState: missing grid");
  if (v.size() != grid->size() || vdot.size() != grid->size())
    throw std::invalid_argument("LinearState: arrays do not match the grid");
  if (dim < 1) throw std::invalid_argument("LinearState: dimension must be positive");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || !std::isfinite(vdot[i]))
      throw std::invalid_argument("LinearState: non-finite sample");
}

double support_radius(const LinearState& s) {
  double peak = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) peak = std::max({peak, std::abs(s.v[i]), std::abs(s.vdot[i])});
  const double floor = 1e-12 * peak;
  for (std::size_t i = s.size(); i-- > 0;)
    if (std::abs(s.v[i]) > floor || std::abs(s.vdot[i]) > floor) return (*s.grid)[i];
  return 0.0;
}

namespace {

// Uniform grid with spacing dr reaching at least `reach`.
GridPtr grid_covering(double dr, double reach) {
  return share(RadialGrid::uniform_spacing(dr, dr * std::ceil(reach / dr - 1e-9)));
}

void check_reach(const LinearState& data, double t) {
  if (data.grid->r_max() < (t - data.t) + support_radius(data) - 1e-12)
    throw std::invalid_argument("linear evolution: r_max must cover the elapsed time plus the support radius");
}

// Evolved states carry round-off ahead of the light cone, so chained calls
// check the reach of the original data once and then advance unchecked.
LinearState leapfrog(const LinearState& data, double t, double cfl, bool repulsive) {
  data.validate();
  const RadialGrid& g = *data.grid;
  const double span = t - data.t;
  if (span < 0.0) throw std::invalid_argument("linear evolution: target time precedes the data");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("linear evolution: cfl must lie in (0, 1]");

  const RadialLaplacian lap(g, data.dim, !repulsive);
  std::vector<double> coef(g.size(), 0.0);
  if (repulsive)
    for (std::size_t i = 1; i < g.size(); ++i) coef[i] = 1.0 / (g[i] * g[i]);
  const double dt_max = std::min(cfl * g.h_min(), 0.95 * lap.stable_dt(coef));

  LinearState s = data;
  if (span == 0.0) return s;
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt_max));
  const double dt = span / static_cast<double>(steps);
  std::vector<double> a(g.size());
  const std::size_t lo = lap.first(), hi = lap.last();
  auto accelerate = [&] {
    lap.apply(s.v, a);
    for (std::size_t i = lo; i <= hi; ++i) a[i] -= coef[i] * s.v[i];
  };
  accelerate();
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = lo; i <= hi; ++i) s.vdot[i] += 0.5 * dt * a[i];
    for (std::size_t i = lo; i <= hi; ++i) s.v[i] += dt * s.vdot[i];
    accelerate();
    for (std::size_t i = lo; i <= hi; ++i) s.vdot[i] += 0.5 * dt * a[i];
  }
  s.t = t;
  return s;
}

} // namespace

LinearState evolve_free(const LinearState& data, double t, double cfl) {
  check_reach(data, t);
  return leapfrog(data, t, cfl, false);
}

LinearState evolve_repulsive_2d(const LinearState& data, double t, double cfl) {
  if (data.dim != 2) throw std::invalid_argument("evolve_repulsive_2d: state must have dim = 2");
  if (std::abs(data.v.front()) > 1e-12) throw std::invalid_argument("evolve_repulsive_2d: phi(0) must vanish");
  check_reach(data, t);
  return leapfrog(data, t, cfl, true);
}

double free_energy(const LinearState& s, double a) {
  const RadialGrid& g = *s.grid;
  const int d = s.dim;
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double r0 = g[i], r1 = g[i + 1];
    if (r1 <= a) continue;
    const double x = std::max(a, r0);
    const double slope = (s.v[i + 1] - s.v[i]) / (r1 - r0);
    e += slope * slope * radial_measure(d, x, r1);
    // Kinetic density vdot² r^(d-1), linear between nodes.
    const double k0 = s.vdot[i] * s.vdot[i] * std::pow(r0, d - 1);
    const double k1 = s.vdot[i + 1] * s.vdot[i + 1] * std::pow(r1, d - 1);
    const double kx = k0 + (k1 - k0) * (x - r0) / (r1 - r0);
    e += 0.5 * (r1 - x) * (kx + k1);
  }
  return e;
}

double repulsive_energy(const LinearState& s, double a) {
  if (a >= s.grid->r_max()) return 0.0;
  const HNorm n = h_norm(*s.grid, s.v, s.vdot, a, infinity);
  return n.h * n.h + n.l2 * n.l2;
}

double exterior_energy(const LinearState& s, double t) {
  return std::sqrt(std::max(free_energy(s, t), 0.0));
}

double exterior_energy_2d(const LinearState& s, double t) {
  return std::sqrt(std::max(repulsive_energy(s, t), 0.0));
}

ExteriorProfile exterior_ratio_profile(const std::function<double(double)>& f, int dim,
                                       const std::vector<double>& times, const ProfileOptions& options) {
  if (times.empty()) throw std::invalid_argument("exterior_ratio_profile: empty time grid");
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
    throw std::invalid_argument("exterior_ratio_profile: times must be nonnegative and increasing");
  if (options.repulsive && dim != 4)
    throw std::invalid_argument("exterior_ratio_profile: the repulsive pass pairs with dim = 4");

  // Size the grid from the support of f on a generous probe grid.
  const auto probe = grid_covering(options.dr, 50.0);
  const LinearState probe_state = LinearState::sample(probe, dim, f, [](double) { return 0.0; });
  const double support = support_radius(probe_state);
  const auto grid = grid_covering(options.dr, times.back() + support + 10.0 * options.dr);

  ExteriorProfile out;
  out.min_free = infinity;
  LinearState s = LinearState::sample(grid, dim, f, [](double) { return 0.0; });
  const double norm0 = exterior_energy(s, 0.0);
  if (!(norm0 > 0.0)) throw std::invalid_argument("exterior_ratio_profile: zero datum");
  for (double t : times) {
    s = leapfrog(s, t, options.cfl, false);
    const double ratio = exterior_energy(s, t) / norm0;
    out.points.push_back({dim, t, ratio});
    out.min_free = std::min(out.min_free, ratio);
  }

  out.min_repulsive = std::numeric_limits<double>::quiet_NaN();
  if (options.repulsive) {
    out.min_repulsive = infinity;
    LinearState w = LinearState::sample(grid, 2, [&](double r) { return r * f(r); }, [](double) { return 0.0; });
    const double w0 = exterior_energy_2d(w, 0.0);
    for (double t : times) {
      w = leapfrog(w, t, options.cfl, true);
      const double ratio = exterior_energy_2d(w, t) / w0;
      out.points.push_back({2, t, ratio});
      out.min_repulsive = std::min(out.min_repulsive, ratio);
    }
  }
  return out;
}

double SplineDatum::operator()(double r) const {
  const double x = r / spacing;
  double acc = coefficients.empty() ? 0.0 : coefficients[0] * boost::math::cardinal_b_spline<3>(x);
  for (std::size_t k = 1; k < coefficients.size(); ++k) {
    const double kk = static_cast<double>(k);
    acc += coefficients[k] *
           (boost::math::cardinal_b_spline<3>(x - kk) + boost::math::cardinal_b_spline<3>(x + kk));
  }
  return acc;
}

double spline_exterior_ratio(const SplineDatum& datum, const ChannelSearchOptions& options) {
  if (datum.spacing < 20.0 * options.dr)
    throw std::invalid_argument("spline_exterior_ratio: spline spacing must span at least 20 cells");
  const auto grid = grid_covering(options.dr, options.t + datum.support() + 10.0 * options.dr);
  const LinearState s0 = LinearState::sample(grid, options.dim, datum, [](double) { return 0.0; });
  const double norm0 = exterior_energy(s0, 0.0);
  if (!(norm0 > 0.0)) return infinity;
  const LinearState s = evolve_free(s0, options.t, 0.4);
  return exterior_energy(s, options.t) / norm0;
}

ChannelSearchResult minimize_exterior_ratio(const ChannelSearchOptions& options) {
  if (options.basis == 0) throw std::invalid_argument("minimize_exterior_ratio: empty basis");
  ChannelSearchResult best;
  best.datum.spacing = options.spacing;
  best.datum.coefficients.assign(options.basis, 0.0);
  best.datum.coefficients[0] = 1.0;
  best.ratio = spline_exterior_ratio(best.datum, options);
  best.evaluations = 1;

  double step = options.initial_step;
  while (step >= options.min_step && best.evaluations < options.max_evaluations) {
    bool improved = false;
    // c_0 stays fixed at 1: the ratio is invariant under rescaling.
    for (std::size_t k = 1; k < options.basis && best.evaluations < options.max_evaluations; ++k) {
      for (double dir : {1.0, -1.0}) {
        SplineDatum trial = best.datum;
        trial.coefficients[k] += dir * step;
        const double r = spline_exterior_ratio(trial, options);
        ++best.evaluations;
        if (r < best.ratio) {
          best.datum = std::move(trial);
          best.ratio = r;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  ChannelSearchOptions fine = options;
  fine.dr = 0.5 * options.dr;
  best.refined_ratio = spline_exterior_ratio(best.datum, fine);
  return best;
}

void write_exterior_csv(const std::filesystem::path& path, const std::vector<RatioPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "dim,t,ratio\n";
  for (const auto& p : points) out << p.dim << ',' << format_double(p.t) << ',' << format_double(p.ratio) << '\n';
}

} // namespace wavemap
