#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "nidreg/dgp.hpp"
#include "nidreg/flir.hpp"
#include "nidreg/grid.hpp"
#include "nidreg/npiv.hpp"
#include "nidreg/spectral.hpp"

namespace nidreg::inference {

/// center +- half_width pointwise.
struct ConfBand {
  GridFunction center;
  double half_width = 0.0;
  double level = 0.95;
  /// Gaussian quantile from the simulation (c_{1-gamma}).
  double critical_value = 0.0;
  /// Set when every residual was zero and the band collapsed to its floor.
  bool degenerate = false;

  [[nodiscard]] bool covers(const GridFunction& f) const;
};

/// offset + sum_j lambda_j (chi2_{1,j} - 1).
class ChiSqMixture {
public:
  ChiSqMixture(Eigen::VectorXd eigenvalues, double offset);

  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  [[nodiscard]] double offset() const noexcept { return offset_; }
  [[nodiscard]] double mean() const noexcept { return offset_; }
  [[nodiscard]] double variance() const noexcept { return 2.0 * eigenvalues_.squaredNorm(); }

  [[nodiscard]] std::vector<double> draw(std::size_t count, std::uint64_t seed) const;
  /// Keeps the largest-magnitude eigenvalues carrying `energy` of sum lambda^2.
  [[nodiscard]] ChiSqMixture truncated(double energy) const;

private:
  Eigen::VectorXd eigenvalues_;
  double offset_;
};

/// Mixture from a symmetric kernel matrix h(X_i, X_j): eigenvalues of h / n.
[[nodiscard]] ChiSqMixture ustat_mixture(const Eigen::MatrixXd& h_matrix, double offset);

/// Mixture for the product kernel h(X_i, X_j) = (a_i b_j + a_j b_i) <g_i, g_j> / 2,
/// with g_i the rows of `features` (already scaled so the Euclidean product is
/// the L2 inner product). Uses the 2p x 2p block operator instead of the n x n
/// matrix; the nonzero spectrum is the same.
[[nodiscard]] ChiSqMixture bilinear_ustat_mixture(const Eigen::MatrixXd& features, const Eigen::VectorXd& a,
                                                  const Eigen::VectorXd& b, double offset);

struct SimulationSettings {
  std::size_t draws = 10000;
  std::uint64_t seed = 0x5eed;
};

[[nodiscard]] ConfBand flir_confband(const flir::FlirSample& sample, const GridFunction& fit, double alpha,
                                     double gamma, double c_const, const SimulationSettings& sim = {});

[[nodiscard]] ConfBand npiv_confband(const npiv::NpivSample& sample, const GridFunction& fit,
                                     const npiv::KernelSpec& kspec, double alpha, double gamma, double c_const,
                                     const SimulationSettings& sim = {});

struct FunctionalInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// Plug-in normalizer: the interval is estimate +- z / pi_hat.
  double pi_hat = 0.0;
};

/// Normal-approximation interval for <phi_1, mu> in the functional linear IV model.
[[nodiscard]] FunctionalInterval functional_ci(const flir::FlirSample& sample, const GridFunction& mu,
                                               const FilterSpec& spec, double gamma);

/// Z and W independent uniforms on [0,1]; Y = structural(Z) + noise_sd * eps.
struct IndependenceDesign {
  double noise_sd = 1.0;
  dgp::Structural structural = [](double z) { return trig_basis_value(3, z); };
};

[[nodiscard]] npiv::NpivSample sample_independent(const IndependenceDesign& design, std::size_t n,
                                                  std::uint64_t seed);

struct LimitCheckConfig {
  IndependenceDesign design;
  npiv::KernelSpec kspec;
  std::size_t grid_size = 100;
  std::size_t n = 2000;
  std::size_t reps = 500;
  /// alpha_n = alpha_scale * n^alpha_exponent
  double alpha_scale = 5.0;
  double alpha_exponent = -2.0 / 3.0;
  /// Sample size used to evaluate the limiting kernel.
  std::size_t mixture_sample = 20000;
  std::size_t mixture_draws = 100000;
  double energy = 0.999;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  [[nodiscard]] double alpha() const;
};

struct LimitCheckReport {
  std::vector<double> statistics;  // n alpha <phi_hat - phi_1, mu0>, one per replication
  ChiSqMixture mixture{Eigen::VectorXd(), 0.0};
  std::size_t eigen_retained = 0;
  double alpha = 0.0;
  double ks = 0.0;
};

/// Limiting mixture of n alpha <phi_hat - phi_1, mu0> under the independence design.
[[nodiscard]] ChiSqMixture degenerate_limit_law(const LimitCheckConfig& config, const GridFunction& mu0);

[[nodiscard]] LimitCheckReport degenerate_limit_check(const LimitCheckConfig& config, const GridFunction& mu0);

}  // namespace nidreg::inference
