#include <wavemap/functionals.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

namespace {

// Visits every cell overlapping [a, b] with the clipped sub-interval [x, y].
template <class F>
void for_cells(const RadialGrid& grid, double a, double b, F&& visit) {
  const std::size_t n = grid.size();
  const double hi = std::min(b, grid.r_max());
  if (!(hi > a)) return;
  for (std::size_t i = grid.locate(a); i + 1 < n; ++i) {
    const double r0 = grid[i];
    if (r0 >= hi) break;
    const double x = std::max(a, r0);
    const double y = std::min(hi, grid[i + 1]);
    if (y > x) visit(i, x, y);
  }
}

// ∫_x^y of the linear interpolant through (r0, d0), (r1, d1).
double linear_piece(double r0, double r1, double d0, double d1, double x, double y) {
  const double h = r1 - r0;
  const double dx = d0 + (d1 - d0) * (x - r0) / h;
  const double dy = d0 + (d1 - d0) * (y - r0) / h;
  return 0.5 * (y - x) * (dx + dy);
}

void check_interval(const RadialGrid& grid, double a, double b) {
  if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("energy: need 0 <= a < b");
  if (a > grid.r_max()) throw std::invalid_argument("energy: a beyond r_max");
}

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite sample");
}

// ell² g(psi)²/r at a node; zero on the axis where psi = m C*.
double potential_density(const RadialGrid& grid, std::span<const double> psi, std::size_t i, int ell,
                          const TargetGeometry& target) {
  if (i == 0) return 0.0;
  const double g = target.g(psi[i]);
  return static_cast<double>(ell * ell) * g * g / grid[i];
}

} // namespace

EnergyReport energy(const RadialGrid& grid, std::span<const double> psi,
                    std::span<const double> psidot, int ell, const TargetGeometry& target, double a,
                    double b) {
  check_interval(grid, a, b);
  check_finite(psi);
  check_finite(psidot);
  EnergyReport rep;
  rep.a = a;
  rep.b = b;
  for_cells(grid, a, b, [&](std::size_t i, double x, double y) {
    const double r0 = grid[i], r1 = grid[i + 1];
    const double s = (psi[i + 1] - psi[i]) / (r1 - r0);
    rep.gradient += 0.5 * s * s * (y * y - x * x);
    rep.kinetic += linear_piece(r0, r1, psidot[i] * psidot[i] * r0, psidot[i + 1] * psidot[i + 1] * r1, x, y);
    rep.potential += linear_piece(r0, r1, potential_density(grid, psi, i, ell, target),
                                  potential_density(grid, psi, i + 1, ell, target), x, y);
  });
  if (std::isinf(b)) {
    // Static harmonic tail c r^-ell: ∫_R^∞ 2 ell² c² r^(-2ell-1) dr = ell c² R^(-2ell).
    const double gN = target.g(psi.back());
    const double tail = static_cast<double>(ell) * gN * gN;
    rep.gradient += 0.5 * tail;
    rep.potential += 0.5 * tail;
  }
  rep.total = rep.kinetic + rep.gradient + rep.potential;
  return rep;
}

EnergyReport energy(const FieldState& state, double a, double b) {
  return energy(*state.grid, state.psi, state.psidot, state.ell, state.target, a, b);
}

double static_energy(const FieldState& state, double a, double b) {
  const EnergyReport e = energy(state, a, b);
  return e.gradient + e.potential;
}

std::vector<double> static_energy_profile(const FieldState& state) {
  const RadialGrid& grid = *state.grid;
  check_finite(state.psi);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r0 = grid[i], r1 = grid[i + 1];
    const double s = (state.psi[i + 1] - state.psi[i]) / (r1 - r0);
    const double gradient = 0.5 * s * s * (r1 * r1 - r0 * r0);
    const double potential = linear_piece(r0, r1, potential_density(grid, state.psi, i, state.ell, state.target),
                                          potential_density(grid, state.psi, i + 1, state.ell, state.target), r0, r1);
    out[i + 1] = out[i] + gradient + potential;
  }
  return out;
}

HNorm h_norm(const RadialGrid& grid, std::span<const double> psi, std::span<const double> psidot,
             double a, double b) {
  check_interval(grid, a, b);
  check_finite(psi);
  check_finite(psidot);
  if (std::abs(psi[0]) > 1e-9 && a < grid[1])
    throw std::domain_error("h_norm: psi(0) must vanish for the H norm");
  double h2 = 0.0, l2 = 0.0;
  auto mass = [&](std::size_t i) { return i == 0 ? 0.0 : psi[i] * psi[i] / grid[i]; };
  for_cells(grid, a, b, [&](std::size_t i, double x, double y) {
    const double r0 = grid[i], r1 = grid[i + 1];
    const double s = (psi[i + 1] - psi[i]) / (r1 - r0);
    h2 += 0.5 * s * s * (y * y - x * x) + linear_piece(r0, r1, mass(i), mass(i + 1), x, y);
    l2 += linear_piece(r0, r1, psidot[i] * psidot[i] * r0, psidot[i + 1] * psidot[i + 1] * r1, x, y);
  });
  return {std::sqrt(std::max(h2, 0.0)), std::sqrt(std::max(l2, 0.0))};
}

HNorm h_norm(const FieldState& state, double a, double b) {
  return h_norm(*state.grid, state.psi, state.psidot, a, b);
}

Degree classify_degree(const FieldState& state) {
  const double c = state.target.c_star();
  const double m = std::round(state.psi.front() / c);
  const double n = std::round(state.psi.back() / c);
  if (!std::isfinite(n) || std::abs(state.psi.back() - n * c) > 0.1 * c)
    throw std::domain_error("open-ended data: boundary value is not near a multiple of C*");
  return {static_cast<int>(m), static_cast<int>(n)};
}

double G_accumulate(const TargetGeometry& target, double psi) {
  if (psi == 0.0) return 0.0;
  const double sign = psi < 0.0 ? -1.0 : 1.0;
  const double end = std::abs(psi);
  const double c = target.c_star();
  auto integrand = [&](double x) { return std::abs(target.g(sign * x)); };
  double total = 0.0;
  // |g| has kinks at multiples of C*; integrate piecewise between them.
  for (double lo = 0.0; lo < end; lo += c) {
    const double hi = std::min(lo + c, end);
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 10, 1e-12);
  }
  return sign * total;
}

BogomolnySplit bogomolny_split(const FieldState& state) {
  const RadialGrid& grid = *state.grid;
  const Degree deg = classify_degree(state);
  BogomolnySplit out;
  const EnergyReport e = energy(state);
  out.kinetic = e.kinetic;
  const double ell = state.ell;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid.cell(i);
    const double rm = grid[i] + 0.5 * h;
    const double s = (state.psi[i + 1] - state.psi[i]) / h;
    const double d = s - ell * state.target.g(0.5 * (state.psi[i] + state.psi[i + 1])) / rm;
    out.defect += d * d * rm * h;
  }
  out.topological = 2.0 * ell * state.target.integral(state.psi.front(), deg.n * state.target.c_star());
  return out;
}

double pointwise_bound(const FieldState& state) {
  double m = 0.0;
  for (double v : state.psi) m = std::max(m, std::abs(v));
  return m;
}

double max_gradient(const RadialGrid& grid, std::span<const double> psi) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    m = std::max(m, std::abs(psi[i + 1] - psi[i]) / grid.cell(i));
  return m;
}

std::optional<double> half_energy_scale(const FieldState& state, double level, double rel_tol) {
  const RadialGrid& grid = *state.grid;
  const auto& psi = state.psi;
  const double ell2 = static_cast<double>(state.ell * state.ell);
  auto pot = [&](std::size_t i) {
    if (i == 0) return 0.0;
    const double g = state.target.g(psi[i]);
    return ell2 * g * g / grid[i];
  };
  // Static energy of cell i restricted to [r_i, y].
  auto partial = [&](std::size_t i, double y) {
    const double r0 = grid[i], r1 = grid[i + 1];
    const double s = (psi[i + 1] - psi[i]) / (r1 - r0);
    return 0.5 * s * s * (y * y - r0 * r0) + linear_piece(r0, r1, pot(i), pot(i + 1), r0, y);
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double cell = partial(i, grid[i + 1]);
    if (acc + cell >= level) {
      double lo = grid[i], hi = grid[i + 1];
      while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (acc + partial(i, mid) >= level) hi = mid;
        else lo = mid;
      }
      return 0.5 * (lo + hi);
    }
    acc += cell;
  }
  return std::nullopt;
}

} // namespace wavemap
