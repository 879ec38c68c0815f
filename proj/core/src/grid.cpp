#include "nidreg/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nidreg {

Grid Grid::midpoint(std::size_t m) {
  require(m >= 4, ErrorKind::invalid_argument, "grid needs at least 4 nodes");
  auto impl = std::make_shared<Impl>();
  const auto n = static_cast<Eigen::Index>(m);
  impl->points.resize(n);
  impl->weights.setConstant(n, 1.0 / static_cast<double>(m));
  for (Eigen::Index i = 0; i < n; ++i) {
    impl->points[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  }
  return Grid(std::move(impl));
}

void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    fail(ErrorKind::grid_mismatch,
         "grids differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " nodes)");
  }
}

GridFunction::GridFunction(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(static_cast<std::size_t>(values_.size()) == grid_.size(), ErrorKind::invalid_argument,
          "value vector length does not match grid");
  require(values_.allFinite(), ErrorKind::invalid_argument, "grid function has non-finite values");
}

GridFunction GridFunction::zero(const Grid& grid) { return constant(grid, 0.0); }

GridFunction GridFunction::constant(const Grid& grid, double c) {
  return GridFunction(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), c));
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  check_same_grid(a.grid(), b.grid());
  return GridFunction(a.grid(), a.values() + b.values());
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  check_same_grid(a.grid(), b.grid());
  return GridFunction(a.grid(), a.values() - b.values());
}

GridFunction operator*(double s, const GridFunction& f) { return GridFunction(f.grid(), s * f.values()); }

double inner(const GridFunction& f, const GridFunction& g) {
  check_same_grid(f.grid(), g.grid());
  return (f.grid().weights().array() * f.values().array() * g.values().array()).sum();
}

double l2_norm(const GridFunction& f) { return std::sqrt(inner(f, f)); }

double sup_norm(const GridFunction& f) { return f.values().cwiseAbs().maxCoeff(); }

double trig_basis_value(int j, double x) {
  require(j >= 1, ErrorKind::invalid_argument, "basis index must be >= 1");
  if (j == 1) return 1.0;
  const int k = j / 2;
  const double arg = 2.0 * std::numbers::pi * k * x;
  return std::numbers::sqrt2 * ((j % 2 == 0) ? std::cos(arg) : std::sin(arg));
}

GridFunction trig_basis(int j, const Grid& grid) {
  require(j >= 1, ErrorKind::invalid_argument, "basis index must be >= 1");
  return GridFunction::sample(grid, [j](double x) { return trig_basis_value(j, x); });
}

Eigen::MatrixXd basis_matrix(const BasisSpec& basis, const Grid& grid) {
  require(basis.count >= 1, ErrorKind::invalid_argument, "basis count must be positive");
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd b(m, basis.count);
  for (int j = 1; j <= basis.count; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) b(i, j - 1) = trig_basis_value(j, grid.points()[i]);
  }
  return b;
}

Eigen::VectorXd basis_coefficients(const GridFunction& f, const BasisSpec& basis) {
  const Eigen::MatrixXd b = basis_matrix(basis, f.grid());
  return b.transpose() * f.grid().weights().cwiseProduct(f.values());
}

GridFunction project_onto_span(const GridFunction& f, const BasisSpec& basis, const std::set<int>& indices) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(f.size()));
  for (int j : indices) {
    if (j < 1 || j > basis.count) {
      fail(ErrorKind::invalid_argument, "basis index " + std::to_string(j) + " outside 1.." +
                                            std::to_string(basis.count));
    }
    const GridFunction phi = trig_basis(j, f.grid());
    out += inner(f, phi) * phi.values();
  }
  return GridFunction(f.grid(), std::move(out));
}

}  // namespace nidreg
