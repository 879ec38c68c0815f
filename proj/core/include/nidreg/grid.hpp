#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <set>

#include "nidreg/error.hpp"

namespace nidreg {

/// Uniform midpoint discretization of [0,1]: node i sits at (i + 1/2)/m and
/// carries weight 1/m. Cheap to copy; all copies share one immutable buffer.
class Grid {
public:
  static Grid midpoint(std::size_t m);

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(impl_->points.size()); }
  [[nodiscard]] const Eigen::VectorXd& points() const noexcept { return impl_->points; }
  [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return impl_->weights; }
  [[nodiscard]] double point(std::size_t i) const { return impl_->points[static_cast<Eigen::Index>(i)]; }
  [[nodiscard]] double weight(std::size_t i) const { return impl_->weights[static_cast<Eigen::Index>(i)]; }

  /// Grids are equal when they carry the same nodes. Midpoint grids are fully
  /// determined by their size.
  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.impl_ == b.impl_ || a.size() == b.size();
  }

private:
  struct Impl {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
  };
  explicit Grid(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

inline Grid make_grid(std::size_t m) { return Grid::midpoint(m); }

/// Real-valued function sampled on a Grid. Immutable value.
class GridFunction {
public:
  GridFunction(Grid grid, Eigen::VectorXd values);

  static GridFunction zero(const Grid& grid);
  static GridFunction constant(const Grid& grid, double c);
  template <class F>
  static GridFunction sample(const Grid& grid, F&& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(grid.points()[i]);
    return GridFunction(grid, std::move(v));
  }

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator*(double s, const GridFunction& f);
  friend GridFunction operator*(const GridFunction& f, double s) { return s * f; }
  friend GridFunction operator-(const GridFunction& f) { return -1.0 * f; }

private:
  Grid grid_;
  Eigen::VectorXd values_;
};

void check_same_grid(const Grid& a, const Grid& b);

[[nodiscard]] double inner(const GridFunction& f, const GridFunction& g);
[[nodiscard]] double l2_norm(const GridFunction& f);
[[nodiscard]] double sup_norm(const GridFunction& f);

/// Orthonormal trigonometric system on [0,1], 1-based:
/// 1 -> 1, 2k -> sqrt(2) cos(2 pi k x), 2k+1 -> sqrt(2) sin(2 pi k x).
[[nodiscard]] double trig_basis_value(int j, double x);
[[nodiscard]] GridFunction trig_basis(int j, const Grid& grid);

struct BasisSpec {
  enum class Kind { trigonometric };
  Kind kind = Kind::trigonometric;
  int count = 1;
};

/// Columns are the first `count` basis functions sampled on `grid`.
[[nodiscard]] Eigen::MatrixXd basis_matrix(const BasisSpec& basis, const Grid& grid);

/// Coefficients <f, phi_j> for j = 1..basis.count.
[[nodiscard]] Eigen::VectorXd basis_coefficients(const GridFunction& f, const BasisSpec& basis);

/// Orthogonal projection of f onto span{phi_j : j in indices}.
[[nodiscard]] GridFunction project_onto_span(const GridFunction& f, const BasisSpec& basis,
                                             const std::set<int>& indices);

}  // namespace nidreg
