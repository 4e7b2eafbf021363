#include <wavemap/target.hpp>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wavemap {

struct TargetGeometry::Table {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
  std::vector<double> samples;
  double step;
};

namespace {

constexpr double pi = std::numbers::pi;

// Maps rho into [0, C*] using oddness and 2C*-periodicity; returns the sign
// picked up by g.
double fold(double rho, double c_star, double& sign) {
  const double period = 2.0 * c_star;
  double x = std::fmod(rho, period);
  if (x < 0.0) x += period;
  sign = 1.0;
  if (x > c_star) { // g(C* + y) = -g(C* - y)
    x = period - x;
    sign = -1.0;
  }
  return x;
}

} // namespace

TargetGeometry TargetGeometry::sphere() {
  TargetGeometry t;
  t.kind_ = TargetKind::sphere;
  t.c_star_ = pi;
  return t;
}

TargetGeometry TargetGeometry::yang_mills() {
  TargetGeometry t;
  t.kind_ = TargetKind::yang_mills;
  t.c_star_ = 1.0;
  return t;
}

TargetGeometry TargetGeometry::custom(std::span<const double> g_samples, double c_star) {
  if (g_samples.size() < 5) throw std::invalid_argument("custom target: need at least 5 samples");
  if (!(c_star > 0.0)) throw std::invalid_argument("custom target: C* must be positive");
  const double step = c_star / static_cast<double>(g_samples.size() - 1);
  const double scale = std::max(1.0, c_star);
  if (std::abs(g_samples.front()) > 1e-12 * scale)
    throw std::invalid_argument("custom target: g(0) must vanish");
  if (std::abs(g_samples.back()) > 1e-12 * scale)
    throw std::invalid_argument("custom target: g(C*) must vanish");
  // One-sided second-order estimate of g'(0).
  const double g0p = (-3.0 * g_samples[0] + 4.0 * g_samples[1] - g_samples[2]) / (2.0 * step);
  if (std::abs(g0p - 1.0) > 1e-2) throw std::invalid_argument("custom target: g'(0) must be 1");
  const std::size_t n = g_samples.size();
  const double gCp = (3.0 * g_samples[n - 1] - 4.0 * g_samples[n - 2] + g_samples[n - 3]) / (2.0 * step);

  TargetGeometry t;
  t.kind_ = TargetKind::custom;
  t.c_star_ = c_star;
  std::vector<double> samples(g_samples.begin(), g_samples.end());
  auto spline = boost::math::interpolators::cardinal_cubic_b_spline<double>(
      samples.begin(), samples.end(), 0.0, step, 1.0, gCp);
  t.table_ = std::make_shared<const Table>(Table{std::move(spline), std::move(samples), step});
  return t;
}

TargetGeometry TargetGeometry::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target table " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("rho,g", 0) != 0) throw std::runtime_error("target table must start with header rho,g");
  std::vector<double> rho, g;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    rho.push_back(std::stod(a));
    g.push_back(std::stod(b));
  }
  if (rho.size() < 5 || rho.front() != 0.0) throw std::runtime_error("target table: rho must start at 0");
  const double step = rho[1] - rho[0];
  for (std::size_t k = 1; k < rho.size(); ++k)
    if (std::abs(rho[k] - rho[k - 1] - step) > 1e-9 * std::max(1.0, rho.back()))
      throw std::runtime_error("target table: rho must be uniformly spaced");
  return custom(g, rho.back());
}

TargetGeometry TargetGeometry::from_name(const std::string& name) {
  if (name == "sphere") return sphere();
  if (name == "yang_mills") return yang_mills();
  if (name.rfind("table:", 0) == 0) return load_table(name.substr(6));
  throw std::invalid_argument("unknown target '" + name + "'");
}

std::string TargetGeometry::name() const {
  switch (kind_) {
  case TargetKind::sphere: return "sphere";
  case TargetKind::yang_mills: return "yang_mills";
  case TargetKind::custom: return "custom";
  }
  return "unknown";
}

double TargetGeometry::g(double rho) const {
  switch (kind_) {
  case TargetKind::sphere: return std::sin(rho);
  case TargetKind::yang_mills: return 0.5 * (1.0 - rho * rho);
  case TargetKind::custom: {
    double sign;
    const double x = fold(rho, c_star_, sign);
    return sign * table_->spline(x);
  }
  }
  return 0.0;
}

double TargetGeometry::g_prime(double rho) const {
  switch (kind_) {
  case TargetKind::sphere: return std::cos(rho);
  case TargetKind::yang_mills: return -rho;
  case TargetKind::custom: {
    double sign;
    const double x = fold(rho, c_star_, sign);
    // g' is even about 0 and about C*, so the fold sign cancels.
    (void)sign;
    return table_->spline.prime(x);
  }
  }
  return 0.0;
}

double TargetGeometry::f(double rho) const {
  switch (kind_) {
  case TargetKind::sphere: return 0.5 * std::sin(2.0 * rho);
  case TargetKind::yang_mills: return -0.5 * rho * (1.0 - rho * rho);
  case TargetKind::custom: return g(rho) * g_prime(rho);
  }
  return 0.0;
}

double TargetGeometry::integral(double a, double b) const {
  if (a == b) return 0.0;
  if (kind_ == TargetKind::sphere) return std::cos(a) - std::cos(b);
  if (kind_ == TargetKind::yang_mills)
    return 0.5 * ((b - b * b * b / 3.0) - (a - a * a * a / 3.0));
  auto integrand = [this](double x) { return g(x); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-13);
}

double TargetGeometry::ground_state_energy(int ell) const {
  return 2.0 * ell * std::abs(integral(lower_vacuum(), upper_vacuum()));
}

bool TargetGeometry::has_interior_zero() const {
  if (kind_ != TargetKind::custom) return false;
  const auto& s = table_->samples;
  for (std::size_t k = 1; k + 1 < s.size(); ++k)
    if (s[k] <= 0.0) return true;
  return false;
}

} // namespace wavemap
