#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace wavemap {

enum class Spacing { uniform, geometric };

/// Radial grid on [0, r_max] with nodes[0] == 0.
///
/// Geometric grids start with spacing `h0` at the origin and grow by a
/// constant ratio until the spacing reaches `h_max`, after which they
/// continue uniformly. The last node is placed exactly on r_max.
class RadialGrid {
public:
  static RadialGrid uniform(double r_max, std::size_t n_nodes);
  static RadialGrid uniform_spacing(double dr, double r_max);
  static RadialGrid geometric(double h0, double ratio, double h_max, double r_max);
  /// Uniform spacing h0 on [0, r_uniform], then cells growing by `ratio`
  /// up to h_max until r_max.
  static RadialGrid stretched(double h0, double r_uniform, double ratio, double h_max, double r_max);
  /// Grid with the given nodes (validated).
  static RadialGrid from_nodes(std::vector<double> nodes);

  std::size_t size() const { return nodes_.size(); }
  double r_max() const { return nodes_.back(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }
  Spacing spacing() const { return spacing_; }

  /// Length of cell [r_i, r_{i+1}].
  double cell(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
  /// Spacing at the origin (first cell).
  double h_origin() const { return nodes_[1] - nodes_[0]; }
  double h_min() const { return h_min_; }

  /// Index i with nodes[i] <= r < nodes[i+1]; clamps to the last cell.
  std::size_t locate(double r) const;

  /// Same grid with every node multiplied by `factor`.
  RadialGrid scaled(double factor) const;

  bool is_uniform() const { return spacing_ == Spacing::uniform; }

private:
  RadialGrid(std::vector<double> nodes, Spacing spacing);
  std::vector<double> nodes_;
  Spacing spacing_ = Spacing::uniform;
  double h_min_ = 0.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr share(RadialGrid grid) {
  return std::make_shared<const RadialGrid>(std::move(grid));
}

} // namespace wavemap
