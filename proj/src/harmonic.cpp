#include <wavemap/harmonic.hpp>

#include <boost/math/interpolators/quintic_hermite.hpp>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <stdexcept>

namespace wavemap {

namespace {

constexpr double s_window = 40.0; // integrate over |ell s| <= s_window
constexpr double ds = 0.01;

} // namespace

struct HarmonicProfile::Table {
  boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>> spline;
  double s_min, s_max;
  double lower, upper;
  double q_min, q_max; // Q at the window ends
  double k_lo, k_hi;   // linearized exponents at the vacua
};

HarmonicProfile ground_state(int ell, const TargetGeometry& target, double lambda) {
  if (ell < 1) throw std::invalid_argument("ground_state: ell must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("ground_state: lambda must be positive");
  if (target.has_interior_zero()) throw std::domain_error("degenerate target: g vanishes inside (0, C*)");

  HarmonicProfile p;
  p.ell_ = ell;
  p.target_ = target;
  p.lambda_ = lambda;
  if (ell == 1 && target.kind() == TargetKind::sphere) return p;

  using namespace boost::numeric::odeint;
  const double l = ell;
  const double lower = target.lower_vacuum(), upper = target.upper_vacuum();
  const double s_max = s_window / l;
  const auto n_half = static_cast<std::size_t>(std::llround(s_max / ds));
  const std::size_t n = 2 * n_half + 1;
  std::vector<double> q(n);

  auto rhs = [&](const double& y, double& dy, double) { dy = l * target.g(y); };
  auto stepper = make_dense_output(1e-13, 1e-13, runge_kutta_dopri5<double>());
  for (int dir : {+1, -1}) {
    double y = 0.5 * (lower + upper);
    q[n_half] = y;
    std::vector<double> times(n_half + 1);
    for (std::size_t k = 0; k <= n_half; ++k) times[k] = dir * static_cast<double>(k) * ds;
    std::size_t k = 0;
    integrate_times(stepper, rhs, y, times.begin(), times.end(), dir * ds * 0.5,
                    [&](const double& v, double) {
                      q[dir > 0 ? n_half + k : n_half - k] = v;
                      ++k;
                    });
  }
  std::vector<double> dq(n), d2q(n);
  for (std::size_t k = 0; k < n; ++k) {
    dq[k] = l * target.g(q[k]);
    d2q[k] = l * target.g_prime(q[k]) * dq[k];
  }
  const double s_min = -static_cast<double>(n_half) * ds;
  const double q_min = q.front(), q_max = q.back();
  auto table = std::make_shared<HarmonicProfile::Table>(HarmonicProfile::Table{
      boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>(
          std::move(q), std::move(dq), std::move(d2q), s_min, ds),
      s_min, -s_min, lower, upper, q_min, q_max, l * target.g_prime(lower), l * target.g_prime(upper)});
  p.table_ = std::move(table);
  return p;
}

double HarmonicProfile::operator()(double r) const {
  const double x = r / lambda_;
  if (!table_) return 2.0 * std::atan(x);
  const Table& t = *table_;
  if (x <= 0.0) return t.lower;
  const double s = std::log(x);
  if (s <= t.s_min) return t.lower + (t.q_min - t.lower) * std::exp(t.k_lo * (s - t.s_min));
  if (s >= t.s_max) return t.upper + (t.q_max - t.upper) * std::exp(t.k_hi * (s - t.s_max));
  return t.spline(s);
}

double HarmonicProfile::derivative(double r) const {
  const double x = r / lambda_;
  if (!table_) return 2.0 / (lambda_ * (1.0 + x * x));
  const Table& t = *table_;
  if (x <= 0.0) {
    // Q - lower ~ c x^k_lo; finite slope only for k_lo = 1.
    if (std::abs(t.k_lo - 1.0) > 1e-12) return 0.0;
    return (t.q_min - t.lower) * std::exp(-t.s_min) / lambda_;
  }
  return static_cast<double>(ell_) * target_.g((*this)(r)) / r;
}

FieldState HarmonicProfile::sample(GridPtr grid) const {
  return FieldState::sample(
      std::move(grid), [this](double r) { return (*this)(r); }, [](double) { return 0.0; }, ell_,
      target_);
}

HarmonicProfile HarmonicProfile::rescaled(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("HarmonicProfile: lambda must be positive");
  HarmonicProfile p = *this;
  p.lambda_ = lambda;
  return p;
}

double harmonic_residual(const RadialGrid& grid, std::span<const double> psi, int ell,
                         const TargetGeometry& target) {
  double worst = 0.0;
  const double l2 = static_cast<double>(ell * ell);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double hm = grid.cell(i - 1), hp = grid.cell(i), r = grid[i];
    const double dm = (psi[i] - psi[i - 1]) / hm, dp = (psi[i + 1] - psi[i]) / hp;
    const double qrr = 2.0 * (dp - dm) / (hm + hp);
    const double qr = (hm * dp + hp * dm) / (hm + hp);
    worst = std::max(worst, std::abs(r * r * qrr + r * qr - l2 * target.f(psi[i])));
  }
  return worst;
}

double harmonic_residual(const HarmonicProfile& profile, const RadialGrid& grid) {
  std::vector<double> q(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) q[i] = profile(grid[i]);
  return harmonic_residual(grid, q, profile.ell(), profile.target());
}

} // namespace wavemap
