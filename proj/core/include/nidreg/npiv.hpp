#pragma once

#include <Eigen/Dense>

#include "nidreg/grid.hpp"
#include "nidreg/spectral.hpp"

namespace nidreg::npiv {

/// Scalar NPIV observations Y = phi(Z) + U with E[U | W] = 0.
struct NpivSample {
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd w;

  NpivSample(Eigen::VectorXd y_, Eigen::VectorXd z_, Eigen::VectorXd w_);
  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(y.size()); }
};

enum class KernelKind { gaussian, epanechnikov };

struct KernelSpec {
  KernelKind kernel = KernelKind::gaussian;
  double h_z = 0.15;
  double h_w = 0.1;

  void validate() const;
};

[[nodiscard]] double kernel_value(KernelKind kind, double u) noexcept;
/// int K(u)^2 du, the convolution kernel evaluated at zero.
[[nodiscard]] double kernel_square_integral(KernelKind kind) noexcept;

/// Matrix with entries h^{-1} K((x_i - grid_a) / h), one row per observation.
[[nodiscard]] Eigen::MatrixXd kernel_weights(KernelKind kind, double h, const Eigen::VectorXd& x,
                                             const Grid& grid);

/// Joint density on the product grid: values(a, b) = f(z_a, w_b).
struct DensityEstimate {
  Eigen::MatrixXd values;
  Grid z_grid;
  Grid w_grid;

  DensityEstimate(Eigen::MatrixXd values_, Grid z_grid_, Grid w_grid_);
  [[nodiscard]] double mass() const;
};

[[nodiscard]] DensityEstimate kde_joint(const NpivSample& sample, const KernelSpec& spec, const Grid& grid);
[[nodiscard]] GridFunction estimate_r(const NpivSample& sample, const KernelSpec& spec, const Grid& grid);
/// (K phi)(w) = int phi(z) f(z, w) dz, mapping the z grid into the w grid.
[[nodiscard]] DiscreteOperator build_operator(const DensityEstimate& density);
[[nodiscard]] GridFunction npiv_fit(const NpivSample& sample, const KernelSpec& kspec, const FilterSpec& fspec,
                                    const Grid& grid);

/// Everything a single NPIV fit produces, for callers that need more than phi_hat.
struct NpivFit {
  DensityEstimate density;
  GridFunction r_hat;
  DiscreteOperator k_hat;
  GridFunction phi_hat;
};

[[nodiscard]] NpivFit npiv_fit_full(const NpivSample& sample, const KernelSpec& kspec, const FilterSpec& fspec,
                                    const Grid& grid);

/// Linear interpolation of grid values at x, constant beyond the end nodes.
[[nodiscard]] double interpolate(const Grid& grid, const Eigen::VectorXd& values, double x);

}  // namespace nidreg::npiv
