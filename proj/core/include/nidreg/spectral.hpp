#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <vector>

#include "nidreg/grid.hpp"

namespace nidreg {

/// Linear operator between two grid-function spaces, stored as a kernel
/// matrix: (K f)(x_i) = sum_j matrix(i, j) * w_j * f(z_j), where w are the
/// domain quadrature weights. The adjoint under the two L2 quadrature inner
/// products is the transposed kernel.
class DiscreteOperator {
public:
  DiscreteOperator(Eigen::MatrixXd kernel, Grid domain, Grid range);

  static DiscreteOperator identity(const Grid& grid);
  static DiscreteOperator zero(const Grid& domain, const Grid& range);
  /// phi -> <u, phi> v
  static DiscreteOperator rank_one(const GridFunction& u, const GridFunction& v);

  [[nodiscard]] const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const Grid& domain() const noexcept { return domain_; }
  [[nodiscard]] const Grid& range() const noexcept { return range_; }

  /// Matrix of the operator in whitened coordinates W_out^{1/2} M W_in^{1/2};
  /// its spectral norm is the L2 operator norm.
  [[nodiscard]] Eigen::MatrixXd whitened() const;

private:
  Eigen::MatrixXd kernel_;
  Grid domain_;
  Grid range_;
};

[[nodiscard]] GridFunction apply(const DiscreteOperator& op, const GridFunction& f);
[[nodiscard]] DiscreteOperator adjoint(const DiscreteOperator& op);
/// a o b
[[nodiscard]] DiscreteOperator compose(const DiscreteOperator& a, const DiscreteOperator& b);
/// K* K
[[nodiscard]] DiscreteOperator gram(const DiscreteOperator& op);
[[nodiscard]] DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b);
[[nodiscard]] DiscreteOperator operator-(const DiscreteOperator& a, const DiscreteOperator& b);
[[nodiscard]] DiscreteOperator operator*(double s, const DiscreteOperator& op);

[[nodiscard]] double operator_norm(const DiscreteOperator& op);
[[nodiscard]] double hilbert_schmidt_norm(const DiscreteOperator& op);

/// Singular system K phi_j = s_j psi_j, K* psi_j = s_j phi_j with the singular
/// functions orthonormal in the quadrature inner products.
class SvdCache {
public:
  /// Relative threshold below which singular values are treated as zero.
  static constexpr double kZeroTolerance = 1e-12;

  SvdCache(Eigen::VectorXd singular_values, Eigen::MatrixXd right, Eigen::MatrixXd left, Grid domain,
           Grid range);

  [[nodiscard]] const Eigen::VectorXd& singular_values() const noexcept { return values_; }
  /// Columns: domain singular functions phi_j sampled on the domain grid.
  [[nodiscard]] const Eigen::MatrixXd& right() const noexcept { return right_; }
  /// Columns: range singular functions psi_j sampled on the range grid.
  [[nodiscard]] const Eigen::MatrixXd& left() const noexcept { return left_; }
  [[nodiscard]] const Grid& domain() const noexcept { return domain_; }
  [[nodiscard]] const Grid& range() const noexcept { return range_; }

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  [[nodiscard]] GridFunction right_function(std::size_t j) const;
  [[nodiscard]] GridFunction left_function(std::size_t j) const;
  /// Singular value with sub-threshold values flushed to exactly zero.
  [[nodiscard]] double effective_value(std::size_t j) const;
  [[nodiscard]] std::size_t numerical_rank() const;

private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd right_;
  Eigen::MatrixXd left_;
  Grid domain_;
  Grid range_;
};

[[nodiscard]] SvdCache svd(const DiscreteOperator& op);

enum class Scheme { tikhonov, spectral_cutoff, iterated_tikhonov, landweber };

/// A spectral filter g_alpha together with its scheme parameters.
struct FilterSpec {
  Scheme scheme = Scheme::tikhonov;
  double alpha = 1.0;
  int iterations = 2;  // iterated Tikhonov order m
  double step = 1.0;   // Landweber step c

  static FilterSpec tikhonov(double alpha);
  static FilterSpec spectral_cutoff(double alpha);
  static FilterSpec iterated_tikhonov(int m, double alpha);
  /// alpha must be 1/k for a positive integer k (the iteration count).
  static FilterSpec landweber(double c, double alpha);

  /// Throws invalid-argument when the parameters are outside their domain.
  void validate() const;
  /// Landweber iteration count 1/alpha.
  [[nodiscard]] int landweber_steps() const;
};

[[nodiscard]] const char* to_string(Scheme scheme) noexcept;

/// g_alpha(lambda). Removable singularities at lambda = 0 use the analytic
/// limits m/alpha (iterated Tikhonov) and c/alpha (Landweber).
[[nodiscard]] double filter_value(const FilterSpec& spec, double lambda);

/// g_alpha(K*K) K* r evaluated in the singular basis of K.
[[nodiscard]] GridFunction regularize(const DiscreteOperator& k_hat, const GridFunction& r_hat,
                                      const FilterSpec& spec);
[[nodiscard]] GridFunction regularize(const SvdCache& svd_k, const GridFunction& r_hat,
                                      const FilterSpec& spec);

/// Solves (alpha I + K*K) phi = K* r by a dense Cholesky factorization. Does
/// not touch the SVD, so it serves as an independent check on regularize().
[[nodiscard]] GridFunction tikhonov_direct(const DiscreteOperator& k_hat, const GridFunction& r_hat,
                                           double alpha);

/// op^beta for a self-adjoint positive semidefinite op (e.g. K*K).
[[nodiscard]] DiscreteOperator operator_power(const DiscreteOperator& op, double beta);

/// (K*K)^{beta/2} psi. beta = 0 is the limit convention: projection of psi
/// onto the span of singular functions with nonzero singular value.
[[nodiscard]] GridFunction source_element(const DiscreteOperator& k, double beta, const GridFunction& psi);

/// Constants of the filter bounds
///   sup |g(l) l^{1/2}| <= c1 / sqrt(alpha)
///   sup |(g(l) l - 1) l^{beta/2}| <= c2(beta) alpha^{beta/2}   for beta <= beta0
///   sup |g(l)| <= c3 / alpha
struct Qualification {
  double c1 = 0;
  /// Only Landweber needs a beta-dependent c2.
  std::function<double(double beta)> c2;
  double c3 = 0;
  double beta0 = 0;  // +inf for unbounded qualification
};

[[nodiscard]] Qualification qualification(const FilterSpec& spec);

/// ||K*||_{2,inf} = sup_{||psi|| <= 1} ||K* psi||_inf for an operator mapping
/// the range grid into the domain grid.
[[nodiscard]] double norm_2inf(const DiscreteOperator& op_adjoint);

}  // namespace nidreg
