#include <wavemap/field.hpp>

#include <cmath>
#include <stdexcept>

namespace wavemap {

void FieldState::validate() const {
  if (!grid) throw std::invalid_argument("FieldState: missing grid");
  if (psi.size() != grid->size() || psidot.size() != grid->size())
    throw std::invalid_argument("FieldState: array length does not match grid");
  if (ell < 1) throw std::invalid_argument("FieldState: ell must be a positive integer");
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (!std::isfinite(psi[i]) || !std::isfinite(psidot[i]))
      throw std::invalid_argument("FieldState: non-finite sample");
  const double c = target.c_star();
  const double m = std::round(psi[0] / c);
  if (std::abs(psi[0] - m * c) > 1e-9)
    throw std::invalid_argument("FieldState: axis value is not a multiple of C*");
  if (std::abs(target.g(psi[0])) > 1e-9)
    throw std::invalid_argument("FieldState: axis value is not a zero of g");
}

FieldState FieldState::sample(GridPtr grid, const std::function<double(double)>& psi,
                              const std::function<double(double)>& psidot, int ell,
                              TargetGeometry target) {
  FieldState s;
  s.grid = std::move(grid);
  s.ell = ell;
  s.target = std::move(target);
  const std::size_t n = s.grid->size();
  s.psi.resize(n);
  s.psidot.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (*s.grid)[i];
    s.psi[i] = psi(r);
    s.psidot[i] = psidot(r);
  }
  return s;
}

FieldState FieldState::zero(GridPtr grid, int ell, TargetGeometry target) {
  FieldState s;
  s.psi.assign(grid->size(), 0.0);
  s.psidot.assign(grid->size(), 0.0);
  s.grid = std::move(grid);
  s.ell = ell;
  s.target = std::move(target);
  return s;
}

FieldState combine(double a, const FieldState& x, double b, const FieldState& y) {
  if (x.grid->size() != y.grid->size()) throw std::invalid_argument("combine: grid mismatch");
  FieldState out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.psi[i] = a * x.psi[i] + b * y.psi[i];
    out.psidot[i] = a * x.psidot[i] + b * y.psidot[i];
  }
  return out;
}

} // namespace wavemap
