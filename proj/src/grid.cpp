#include <wavemap/grid.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavemap {

RadialGrid::RadialGrid(std::vector<double> nodes, Spacing spacing)
    : nodes_(std::move(nodes)), spacing_(spacing) {
  if (nodes_.size() < 3)
    throw std::invalid_argument("RadialGrid: need at least 3 nodes");
  if (nodes_.front() != 0.0)
    throw std::invalid_argument("RadialGrid: nodes[0] must be 0");
  h_min_ = nodes_[1] - nodes_[0];
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double h = nodes_[i] - nodes_[i - 1];
    if (!(h > 0.0) || !std::isfinite(nodes_[i]))
      throw std::invalid_argument("RadialGrid: nodes must be finite and strictly increasing");
    h_min_ = std::min(h_min_, h);
  }
}

RadialGrid RadialGrid::uniform(double r_max, std::size_t n_nodes) {
  if (!(r_max > 0.0) || n_nodes < 3)
    throw std::invalid_argument("RadialGrid::uniform: bad r_max or n_nodes");
  std::vector<double> nodes(n_nodes);
  const double h = r_max / static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i) nodes[i] = static_cast<double>(i) * h;
  nodes.back() = r_max;
  return RadialGrid(std::move(nodes), Spacing::uniform);
}

RadialGrid RadialGrid::uniform_spacing(double dr, double r_max) {
  if (!(dr > 0.0) || !(r_max > dr))
    throw std::invalid_argument("RadialGrid::uniform_spacing: bad dr or r_max");
  const auto cells = static_cast<std::size_t>(std::llround(r_max / dr));
  if (std::abs(static_cast<double>(cells) * dr - r_max) > 1e-9 * r_max)
    throw std::invalid_argument("RadialGrid::uniform_spacing: r_max must be a multiple of dr");
  return uniform(r_max, cells + 1);
}

RadialGrid RadialGrid::geometric(double h0, double ratio, double h_max, double r_max) {
  if (!(h0 > 0.0) || !(ratio >= 1.0) || !(h_max >= h0) || !(r_max > h0))
    throw std::invalid_argument("RadialGrid::geometric: bad parameters");
  std::vector<double> nodes{0.0};
  double h = h0;
  while (nodes.back() + h < r_max) {
    nodes.push_back(nodes.back() + h);
    h = std::min(h * ratio, h_max);
  }
  // Merge a tiny last cell into its neighbour.
  if (r_max - nodes.back() < 0.5 * h && nodes.size() > 2) nodes.pop_back();
  nodes.push_back(r_max);
  return RadialGrid(std::move(nodes), Spacing::geometric);
}

RadialGrid RadialGrid::stretched(double h0, double r_uniform, double ratio, double h_max, double r_max) {
  if (!(h0 > 0.0) || !(ratio >= 1.0) || !(h_max >= h0) || !(r_uniform >= h0) || !(r_max > r_uniform))
    throw std::invalid_argument("RadialGrid::stretched: bad parameters");
  const auto n_uniform = static_cast<std::size_t>(std::floor(r_uniform / h0 + 1e-9));
  std::vector<double> nodes;
  nodes.reserve(n_uniform + 1);
  for (std::size_t i = 0; i <= n_uniform; ++i) nodes.push_back(static_cast<double>(i) * h0);
  double h = std::min(h0 * ratio, h_max);
  while (nodes.back() + h < r_max) {
    nodes.push_back(nodes.back() + h);
    h = std::min(h * ratio, h_max);
  }
  if (r_max - nodes.back() < 0.5 * h && nodes.size() > n_uniform + 1) nodes.pop_back();
  nodes.push_back(r_max);
  return RadialGrid(std::move(nodes), Spacing::geometric);
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
  RadialGrid g(std::move(nodes), Spacing::geometric);
  const double h = g.cell(0);
  bool uniform = true;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i] - static_cast<double>(i) * h) > 1e-12 * std::max(1.0, g[i])) {
      uniform = false;
      break;
    }
  if (uniform) g.spacing_ = Spacing::uniform;
  return g;
}

std::size_t RadialGrid::locate(double r) const {
  if (r <= nodes_.front()) return 0;
  if (r >= nodes_.back()) return nodes_.size() - 2;
  if (spacing_ == Spacing::uniform) {
    const double h = nodes_[1];
    auto i = static_cast<std::size_t>(r / h);
    i = std::min(i, nodes_.size() - 2);
    // Guard against rounding at cell boundaries.
    while (i > 0 && nodes_[i] > r) --i;
    while (i + 2 < nodes_.size() && nodes_[i + 1] <= r) ++i;
    return i;
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  return static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
}

RadialGrid RadialGrid::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("RadialGrid::scaled: factor must be positive");
  std::vector<double> nodes(nodes_);
  for (double& r : nodes) r *= factor;
  return RadialGrid(std::move(nodes), spacing_);
}

} // namespace wavemap
