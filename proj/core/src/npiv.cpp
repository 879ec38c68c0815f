#include "nidreg/npiv.hpp"

#include <cmath>
#include <numbers>

namespace nidreg::npiv {

NpivSample::NpivSample(Eigen::VectorXd y_, Eigen::VectorXd z_, Eigen::VectorXd w_)
    : y(std::move(y_)), z(std::move(z_)), w(std::move(w_)) {
  require(y.size() >= 1, ErrorKind::invalid_argument, "empty NPIV sample");
  require(z.size() == y.size() && w.size() == y.size(), ErrorKind::invalid_argument,
          "Y, Z and W must have equal length");
  require(y.allFinite() && z.allFinite() && w.allFinite(), ErrorKind::invalid_argument,
          "NPIV sample has non-finite entries");
  require(z.minCoeff() >= 0.0 && z.maxCoeff() <= 1.0 && w.minCoeff() >= 0.0 && w.maxCoeff() <= 1.0,
          ErrorKind::invalid_argument, "Z and W must lie in [0, 1]");
}

void KernelSpec::validate() const {
  require(std::isfinite(h_z) && h_z > 0.0 && std::isfinite(h_w) && h_w > 0.0, ErrorKind::invalid_argument,
          "bandwidths must be positive");
}

double kernel_value(KernelKind kind, double u) noexcept {
  switch (kind) {
    case KernelKind::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case KernelKind::epanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

double kernel_square_integral(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::gaussian: return 1.0 / (2.0 * std::sqrt(std::numbers::pi));
    case KernelKind::epanechnikov: return 0.6;
  }
  return 0.0;
}

Eigen::MatrixXd kernel_weights(KernelKind kind, double h, const Eigen::VectorXd& x, const Grid& grid) {
  const Eigen::Index n = x.size();
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd out(n, m);
  const double inv_h = 1.0 / h;
  for (Eigen::Index a = 0; a < m; ++a) {
    const double g = grid.points()[a];
    for (Eigen::Index i = 0; i < n; ++i) out(i, a) = inv_h * kernel_value(kind, (x[i] - g) * inv_h);
  }
  return out;
}

DensityEstimate::DensityEstimate(Eigen::MatrixXd values_, Grid z_grid_, Grid w_grid_)
    : values(std::move(values_)), z_grid(std::move(z_grid_)), w_grid(std::move(w_grid_)) {
  require(static_cast<std::size_t>(values.rows()) == z_grid.size() &&
              static_cast<std::size_t>(values.cols()) == w_grid.size(),
          ErrorKind::invalid_argument, "density shape does not match grids");
  require(values.allFinite(), ErrorKind::invalid_argument, "density has non-finite entries");
}

double DensityEstimate::mass() const { return z_grid.weights().transpose() * values * w_grid.weights(); }

DensityEstimate kde_joint(const NpivSample& sample, const KernelSpec& spec, const Grid& grid) {
  spec.validate();
  const Eigen::MatrixXd kz = kernel_weights(spec.kernel, spec.h_z, sample.z, grid);
  const Eigen::MatrixXd kw = kernel_weights(spec.kernel, spec.h_w, sample.w, grid);
  Eigen::MatrixXd f = kz.transpose() * kw / static_cast<double>(sample.n());
  return DensityEstimate(std::move(f), grid, grid);
}

GridFunction estimate_r(const NpivSample& sample, const KernelSpec& spec, const Grid& grid) {
  spec.validate();
  const Eigen::MatrixXd kw = kernel_weights(spec.kernel, spec.h_w, sample.w, grid);
  Eigen::VectorXd r = kw.transpose() * sample.y / static_cast<double>(sample.n());
  return GridFunction(grid, std::move(r));
}

DiscreteOperator build_operator(const DensityEstimate& density) {
  return DiscreteOperator(density.values.transpose(), density.z_grid, density.w_grid);
}

NpivFit npiv_fit_full(const NpivSample& sample, const KernelSpec& kspec, const FilterSpec& fspec,
                      const Grid& grid) {
  kspec.validate();
  const Eigen::MatrixXd kz = kernel_weights(kspec.kernel, kspec.h_z, sample.z, grid);
  const Eigen::MatrixXd kw = kernel_weights(kspec.kernel, kspec.h_w, sample.w, grid);
  const double inv_n = 1.0 / static_cast<double>(sample.n());
  DensityEstimate density(kz.transpose() * kw * inv_n, grid, grid);
  GridFunction r_hat(grid, kw.transpose() * sample.y * inv_n);
  DiscreteOperator k_hat = build_operator(density);
  GridFunction phi_hat = regularize(k_hat, r_hat, fspec);
  return NpivFit{std::move(density), std::move(r_hat), std::move(k_hat), std::move(phi_hat)};
}

GridFunction npiv_fit(const NpivSample& sample, const KernelSpec& kspec, const FilterSpec& fspec,
                      const Grid& grid) {
  return npiv_fit_full(sample, kspec, fspec, grid).phi_hat;
}

double interpolate(const Grid& grid, const Eigen::VectorXd& values, double x) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  const double pos = x * static_cast<double>(m) - 0.5;  // fractional node index
  if (pos <= 0.0) return values[0];
  if (pos >= static_cast<double>(m - 1)) return values[m - 1];
  const auto i = static_cast<Eigen::Index>(std::floor(pos));
  const double t = pos - static_cast<double>(i);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

}  // namespace nidreg::npiv
