#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

#include "nidreg/grid.hpp"
#include "nidreg/spectral.hpp"

namespace nidreg::flir {

/// Functional linear IV observations Y_i = <Z_i, phi> + U_i with a functional
/// instrument W_i. Row i of z / w holds Z_i / W_i sampled on the grid.
class FlirSample {
public:
  FlirSample(Eigen::VectorXd y, Eigen::MatrixXd z, Eigen::MatrixXd w, Grid grid);

  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(y_.size()); }
  [[nodiscard]] const Eigen::VectorXd& y() const noexcept { return y_; }
  [[nodiscard]] const Eigen::MatrixXd& z() const noexcept { return z_; }
  [[nodiscard]] const Eigen::MatrixXd& w() const noexcept { return w_; }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] GridFunction z_function(std::size_t i) const;
  [[nodiscard]] GridFunction w_function(std::size_t i) const;

  /// Copy with pointwise sample means of Z and W removed.
  [[nodiscard]] FlirSample demeaned() const;

private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd z_;
  Eigen::MatrixXd w_;
  Grid grid_;
};

/// (1/n) sum_i Y_i W_i
[[nodiscard]] GridFunction estimate_r(const FlirSample& sample);
/// phi -> (1/n) sum_i <Z_i, phi> W_i
[[nodiscard]] DiscreteOperator estimate_K(const FlirSample& sample);
[[nodiscard]] GridFunction flir_fit(const FlirSample& sample, const FilterSpec& spec);

/// Karhunen-Loeve style generator: Z = sum_{j<=terms} j^{-decay} xi_j phi_j,
/// W = sum_{j<=J} j^{-decay} xi_j phi_j + instrument_noise * sum_{j<=terms}
/// j^{-decay} nu_j phi_j with J = min(j0, terms). The cross-covariance operator
/// is diagonal in the trigonometric basis and annihilates phi_j for j > J.
struct SyntheticConfig {
  std::optional<int> j0;  // nullopt: every term of Z is instrumented
  int terms = 10;
  double decay = 1.5;
  double instrument_noise = 1.0;
  double noise_sd = 0.2;
};

class SyntheticDgp {
public:
  SyntheticDgp(SyntheticConfig config, GridFunction phi);

  [[nodiscard]] const SyntheticConfig& config() const noexcept { return config_; }
  [[nodiscard]] int identified_terms() const noexcept;
  [[nodiscard]] const GridFunction& phi() const noexcept { return phi_; }
  /// Projection of phi onto the instrumented basis functions.
  [[nodiscard]] GridFunction best_approximation() const;
  /// Population cross-covariance operator E[W <Z, .>].
  [[nodiscard]] DiscreteOperator population_operator() const;

  [[nodiscard]] FlirSample sample(std::size_t n, std::uint64_t seed) const;

private:
  SyntheticConfig config_;
  GridFunction phi_;
  Eigen::MatrixXd basis_;  // grid x terms
};

}  // namespace nidreg::flir
