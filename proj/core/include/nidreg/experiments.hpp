#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nidreg/dgp.hpp"
#include "nidreg/grid.hpp"
#include "nidreg/inference.hpp"
#include "nidreg/npiv.hpp"
#include "nidreg/spectral.hpp"

namespace nidreg::bench {

/// alpha_n = scale * n^exponent
struct AlphaRule {
  double scale = 0.003;
  double exponent = 0.0;

  [[nodiscard]] double at(std::size_t n) const;
};

/// Regularization scheme parameters; alpha comes from the experiment.
struct SchemeSpec {
  Scheme scheme = Scheme::tikhonov;
  int iterations = 2;
  double step = 1.0;

  [[nodiscard]] FilterSpec with_alpha(double alpha) const;
};

/// "1", "2", ..., or "inf" for the untruncated design.
[[nodiscard]] std::string j0_label(const std::optional<int>& j0);

struct McConfig {
  std::vector<std::optional<int>> j0s{1, 2, std::nullopt};
  std::vector<std::size_t> ns{1000, 5000};
  std::size_t reps = 500;
  double alpha = 0.003;
  SchemeSpec scheme;
  npiv::KernelSpec kspec;
  std::size_t grid_size = 100;
  int k_max = 25;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

struct McCell {
  std::optional<int> j0;
  std::size_t n = 0;
  Scheme scheme = Scheme::tikhonov;
  double alpha = 0.0;
  double h_z = 0.0;
  double h_w = 0.0;
  std::size_t reps = 0;
  double l2_mean = 0.0;    // mean ||phi_hat - phi_1||
  double l2sq_mean = 0.0;  // mean ||phi_hat - phi_1||^2
  double sup_mean = 0.0;   // mean ||phi_hat - phi_1||_inf
  double l2_se = 0.0;
  double l2sq_se = 0.0;
  double sup_se = 0.0;
  // Per grid point: mean fit, 2.5% and 97.5% envelopes, phi and phi_1.
  Eigen::VectorXd mean_fit, lo, hi, phi, phi1;
  // Mean of <phi_hat, phi_j> over replications, j = 1..coefficient_count.
  Eigen::VectorXd coef_mean, coef_se, coef_abs_mean;
};

struct McResult {
  std::vector<McCell> cells;
  Eigen::VectorXd z;  // grid nodes
};

/// Monte Carlo error table over (j0, n) cells of the non-identified design.
/// Cells are returned in j0-major order. `coefficient_count` trigonometric
/// coefficients of each fit are averaged as well.
[[nodiscard]] McResult run_mc(const McConfig& config, int coefficient_count = 8);

struct CoverageConfig {
  std::vector<std::optional<int>> j0s{1, 2, std::nullopt};
  std::vector<std::size_t> ns{1000, 4000};
  std::size_t reps = 300;
  std::vector<double> gammas{0.05};
  std::vector<double> c_consts{0.0, 0.1};
  AlphaRule flir_alpha{0.05, -1.0 / 3.0};
  AlphaRule npiv_alpha{0.003, 0.0};
  npiv::KernelSpec kspec;
  std::size_t grid_size = 100;
  int k_max = 25;
  std::size_t sim_draws = 10000;
  bool flir = true;
  bool npiv = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

struct CoverageRow {
  std::string model;  // "flir" or "npiv"
  std::optional<int> j0;
  std::size_t n = 0;
  double gamma = 0.0;
  double c_const = 0.0;
  double alpha = 0.0;
  std::size_t reps = 0;
  double coverage = 0.0;
  double mean_half_width = 0.0;
};

[[nodiscard]] std::vector<CoverageRow> run_coverage(const CoverageConfig& config);

struct LimitRunConfig {
  inference::LimitCheckConfig base;
  std::vector<std::size_t> ns{500, 2000};
  std::size_t seeds = 5;
  std::vector<double> mu0_scales{1.0};
  /// Trigonometric basis index of mu0.
  int mu0_index = 3;

  void validate() const;
};

struct LimitRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double mu0_scale = 1.0;
  double alpha = 0.0;
  std::size_t reps = 0;
  double ks = 0.0;
  std::size_t eigen_retained = 0;
  double offset = 0.0;
  double mixture_variance = 0.0;
  double stat_mean = 0.0;
  double stat_variance = 0.0;
};

/// Seed used for the k-th repetition of the limit check.
[[nodiscard]] std::uint64_t limit_seed(std::uint64_t base, std::size_t k) noexcept;
[[nodiscard]] std::vector<LimitRow> run_limit_check(const LimitRunConfig& config);

struct BoundConfig {
  std::optional<int> j0 = 2;
  std::size_t n = 1000;
  std::size_t reps = 100;
  double beta = 1.0;
  double alpha_min = 1e-5;
  double alpha_max = 1.0;
  std::size_t alpha_points = 16;
  npiv::KernelSpec kspec;
  std::size_t grid_size = 100;
  int k_max = 25;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

struct BoundRow {
  double alpha = 0.0;
  double variance = 0.0;
  double nonidentified = 0.0;
  double operator_term = 0.0;
  double bias = 0.0;
  double bound = 0.0;
  double empirical_risk = 0.0;
};

struct BoundReport {
  double c_delta = 0.0;  // E||r_hat - K_hat phi||^2
  double c_rho1 = 0.0;   // E||K_hat phi_0||
  double c_rho2 = 0.0;   // E||K_hat - K||^2
  double c_f = 0.0;      // ||psi|| in phi_1 = (K*K)^{beta/2} psi
  double beta = 0.0;
  std::vector<BoundRow> rows;
  double alpha_bound_min = 0.0;
  double alpha_empirical_min = 0.0;
  bool bias_nondecreasing = false;
  bool variance_nonincreasing = false;
  bool interior_empirical_minimum = false;
};

/// The four terms of the L2 risk bound for Tikhonov: variance, non-identified
/// operator term, uniform operator term and regularization bias.
[[nodiscard]] BoundRow bound_terms(double alpha, double beta, double c_delta, double c_rho1, double c_rho2,
                                   double c_f);
[[nodiscard]] BoundReport eval_bound(const BoundConfig& config);

struct FiltersConfig {
  std::vector<double> alphas{0.1, 0.01, 0.001};
  int iterations = 2;
  double step = 1.0;
  std::size_t points = 11;
  double lambda_max = 1.0;

  void validate() const;
};

struct FilterRow {
  Scheme scheme = Scheme::tikhonov;
  double alpha = 0.0;
  double lambda = 0.0;
  double g = 0.0;
};

[[nodiscard]] std::vector<FilterRow> run_filters(const FiltersConfig& config);

}  // namespace nidreg::bench
