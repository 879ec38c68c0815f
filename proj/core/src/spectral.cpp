#include "nidreg/spectral.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <string>

namespace nidreg {

namespace {

Eigen::VectorXd sqrt_weights(const Grid& g) { return g.weights().cwiseSqrt(); }

}  // namespace

DiscreteOperator::DiscreteOperator(Eigen::MatrixXd kernel, Grid domain, Grid range)
    : kernel_(std::move(kernel)), domain_(std::move(domain)), range_(std::move(range)) {
  require(static_cast<std::size_t>(kernel_.rows()) == range_.size() &&
              static_cast<std::size_t>(kernel_.cols()) == domain_.size(),
          ErrorKind::invalid_argument, "kernel shape does not match grids");
  require(kernel_.allFinite(), ErrorKind::invalid_argument, "operator kernel has non-finite entries");
}

DiscreteOperator DiscreteOperator::identity(const Grid& grid) {
  Eigen::MatrixXd k = grid.weights().cwiseInverse().asDiagonal();
  return DiscreteOperator(std::move(k), grid, grid);
}

DiscreteOperator DiscreteOperator::zero(const Grid& domain, const Grid& range) {
  return DiscreteOperator(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(range.size()),
                                                static_cast<Eigen::Index>(domain.size())),
                          domain, range);
}

DiscreteOperator DiscreteOperator::rank_one(const GridFunction& u, const GridFunction& v) {
  return DiscreteOperator(v.values() * u.values().transpose(), u.grid(), v.grid());
}

Eigen::MatrixXd DiscreteOperator::whitened() const {
  return sqrt_weights(range_).asDiagonal() * kernel_ * sqrt_weights(domain_).asDiagonal();
}

GridFunction apply(const DiscreteOperator& op, const GridFunction& f) {
  check_same_grid(op.domain(), f.grid());
  Eigen::VectorXd out = op.kernel() * op.domain().weights().cwiseProduct(f.values());
  return GridFunction(op.range(), std::move(out));
}

DiscreteOperator adjoint(const DiscreteOperator& op) {
  return DiscreteOperator(op.kernel().transpose(), op.range(), op.domain());
}

DiscreteOperator compose(const DiscreteOperator& a, const DiscreteOperator& b) {
  check_same_grid(a.domain(), b.range());
  Eigen::MatrixXd k = a.kernel() * b.range().weights().asDiagonal() * b.kernel();
  return DiscreteOperator(std::move(k), b.domain(), a.range());
}

DiscreteOperator gram(const DiscreteOperator& op) { return compose(adjoint(op), op); }

DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b) {
  check_same_grid(a.domain(), b.domain());
  check_same_grid(a.range(), b.range());
  return DiscreteOperator(a.kernel() + b.kernel(), a.domain(), a.range());
}

DiscreteOperator operator-(const DiscreteOperator& a, const DiscreteOperator& b) {
  check_same_grid(a.domain(), b.domain());
  check_same_grid(a.range(), b.range());
  return DiscreteOperator(a.kernel() - b.kernel(), a.domain(), a.range());
}

DiscreteOperator operator*(double s, const DiscreteOperator& op) {
  return DiscreteOperator(s * op.kernel(), op.domain(), op.range());
}

double operator_norm(const DiscreteOperator& op) {
  const Eigen::MatrixXd w = op.whitened();
  if (w.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> dec(w);
  return dec.singularValues().size() > 0 ? dec.singularValues()[0] : 0.0;
}

double hilbert_schmidt_norm(const DiscreteOperator& op) { return op.whitened().norm(); }

SvdCache::SvdCache(Eigen::VectorXd singular_values, Eigen::MatrixXd right, Eigen::MatrixXd left,
                   Grid domain, Grid range)
    : values_(std::move(singular_values)),
      right_(std::move(right)),
      left_(std::move(left)),
      domain_(std::move(domain)),
      range_(std::move(range)) {}

GridFunction SvdCache::right_function(std::size_t j) const {
  return GridFunction(domain_, right_.col(static_cast<Eigen::Index>(j)));
}

GridFunction SvdCache::left_function(std::size_t j) const {
  return GridFunction(range_, left_.col(static_cast<Eigen::Index>(j)));
}

double SvdCache::effective_value(std::size_t j) const {
  if (values_.size() == 0) return 0.0;
  const double s = values_[static_cast<Eigen::Index>(j)];
  return s > kZeroTolerance * values_[0] ? s : 0.0;
}

std::size_t SvdCache::numerical_rank() const {
  std::size_t r = 0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (effective_value(j) > 0.0) ++r;
  }
  return r;
}

SvdCache svd(const DiscreteOperator& op) {
  const Eigen::MatrixXd w = op.whitened();
  Eigen::BDCSVD<Eigen::MatrixXd> dec(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) fail(ErrorKind::decomposition, "SVD did not converge");
  const Eigen::VectorXd& s = dec.singularValues();
  if (!s.allFinite()) fail(ErrorKind::decomposition, "SVD produced non-finite singular values");
  Eigen::MatrixXd right = sqrt_weights(op.domain()).cwiseInverse().asDiagonal() * dec.matrixV();
  Eigen::MatrixXd left = sqrt_weights(op.range()).cwiseInverse().asDiagonal() * dec.matrixU();
  return SvdCache(s, std::move(right), std::move(left), op.domain(), op.range());
}

FilterSpec FilterSpec::tikhonov(double alpha) {
  FilterSpec s{Scheme::tikhonov, alpha, 1, 1.0};
  s.validate();
  return s;
}

FilterSpec FilterSpec::spectral_cutoff(double alpha) {
  FilterSpec s{Scheme::spectral_cutoff, alpha, 1, 1.0};
  s.validate();
  return s;
}

FilterSpec FilterSpec::iterated_tikhonov(int m, double alpha) {
  FilterSpec s{Scheme::iterated_tikhonov, alpha, m, 1.0};
  s.validate();
  return s;
}

FilterSpec FilterSpec::landweber(double c, double alpha) {
  FilterSpec s{Scheme::landweber, alpha, 1, c};
  s.validate();
  return s;
}

void FilterSpec::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::invalid_argument,
          "regularization level alpha must be positive");
  switch (scheme) {
    case Scheme::tikhonov:
    case Scheme::spectral_cutoff:
      break;
    case Scheme::iterated_tikhonov:
      require(iterations >= 2, ErrorKind::invalid_argument, "iterated Tikhonov needs m >= 2");
      break;
    case Scheme::landweber: {
      require(std::isfinite(step) && step > 0.0, ErrorKind::invalid_argument, "Landweber step must be positive");
      const double k = 1.0 / alpha;
      require(std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, k) && std::round(k) >= 1.0,
              ErrorKind::invalid_argument, "Landweber alpha must be 1/k for a positive integer k");
      break;
    }
  }
}

int FilterSpec::landweber_steps() const { return static_cast<int>(std::lround(1.0 / alpha)); }

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::tikhonov: return "tikhonov";
    case Scheme::spectral_cutoff: return "spectral_cutoff";
    case Scheme::iterated_tikhonov: return "iterated_tikhonov";
    case Scheme::landweber: return "landweber";
  }
  return "unknown";
}

double filter_value(const FilterSpec& spec, double lambda) {
  const double a = spec.alpha;
  switch (spec.scheme) {
    case Scheme::tikhonov:
      return 1.0 / (a + lambda);
    case Scheme::spectral_cutoff:
      return lambda >= a ? 1.0 / lambda : 0.0;
    case Scheme::iterated_tikhonov: {
      const double m = spec.iterations;
      if (lambda == 0.0) return m / a;
      // 1 - (alpha / (lambda + alpha))^m without cancellation for small lambda
      return -std::expm1(-m * std::log1p(lambda / a)) / lambda;
    }
    case Scheme::landweber: {
      const double c = spec.step;
      const double k = spec.landweber_steps();
      if (lambda == 0.0) return c / a;
      const double x = c * lambda;
      if (x < 1.0) return -std::expm1(k * std::log1p(-x)) / lambda;
      return (1.0 - std::pow(1.0 - x, k)) / lambda;
    }
  }
  return 0.0;
}

GridFunction regularize(const SvdCache& svd_k, const GridFunction& r_hat, const FilterSpec& spec) {
  spec.validate();
  check_same_grid(svd_k.range(), r_hat.grid());
  const Eigen::VectorXd coeff = svd_k.left().transpose() * r_hat.grid().weights().cwiseProduct(r_hat.values());
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(coeff.size());
  for (Eigen::Index j = 0; j < coeff.size(); ++j) {
    const double s = svd_k.effective_value(static_cast<std::size_t>(j));
    if (s > 0.0) scaled[j] = filter_value(spec, s * s) * s * coeff[j];
  }
  return GridFunction(svd_k.domain(), svd_k.right() * scaled);
}

GridFunction regularize(const DiscreteOperator& k_hat, const GridFunction& r_hat, const FilterSpec& spec) {
  check_same_grid(k_hat.range(), r_hat.grid());
  return regularize(svd(k_hat), r_hat, spec);
}

GridFunction tikhonov_direct(const DiscreteOperator& k_hat, const GridFunction& r_hat, double alpha) {
  require(alpha > 0.0, ErrorKind::invalid_argument, "alpha must be positive");
  check_same_grid(k_hat.range(), r_hat.grid());
  const Eigen::MatrixXd a = k_hat.whitened();
  const Eigen::VectorXd b = a.transpose() * sqrt_weights(r_hat.grid()).cwiseProduct(r_hat.values());
  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += alpha;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) fail(ErrorKind::decomposition, "normal equations are not positive definite");
  const Eigen::VectorXd x = llt.solve(b);
  return GridFunction(k_hat.domain(), sqrt_weights(k_hat.domain()).cwiseInverse().cwiseProduct(x));
}

DiscreteOperator operator_power(const DiscreteOperator& op, double beta) {
  require(beta > 0.0, ErrorKind::invalid_argument, "power must be positive");
  require(op.domain() == op.range(), ErrorKind::invalid_argument, "operator is not an endomorphism");
  const Eigen::MatrixXd& k = op.kernel();
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  require((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorKind::invalid_argument,
          "operator is not self-adjoint");
  const Eigen::VectorXd sw = sqrt_weights(op.domain());
  Eigen::MatrixXd s = op.whitened();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) fail(ErrorKind::decomposition, "eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  if (lam.minCoeff() < -1e-8 * std::max(top, 1e-300)) {
    fail(ErrorKind::invalid_argument, "operator is not positive semidefinite");
  }
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    lam[i] = lam[i] > SvdCache::kZeroTolerance * top ? std::pow(lam[i], beta) : 0.0;
  }
  const Eigen::MatrixXd& q = eig.eigenvectors();
  Eigen::MatrixXd w = q * lam.asDiagonal() * q.transpose();
  Eigen::MatrixXd kern = sw.cwiseInverse().asDiagonal() * w * sw.cwiseInverse().asDiagonal();
  return DiscreteOperator(std::move(kern), op.domain(), op.range());
}

GridFunction source_element(const DiscreteOperator& k, double beta, const GridFunction& psi) {
  require(beta >= 0.0, ErrorKind::invalid_argument, "source smoothness must be nonnegative");
  check_same_grid(k.domain(), psi.grid());
  const SvdCache dec = svd(k);
  const Eigen::VectorXd coeff = dec.right().transpose() * psi.grid().weights().cwiseProduct(psi.values());
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(coeff.size());
  for (Eigen::Index j = 0; j < coeff.size(); ++j) {
    const double s = dec.effective_value(static_cast<std::size_t>(j));
    if (s > 0.0) scaled[j] = (beta == 0.0 ? 1.0 : std::pow(s, beta)) * coeff[j];
  }
  return GridFunction(k.domain(), dec.right() * scaled);
}

Qualification qualification(const FilterSpec& spec) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto one = [](double) { return 1.0; };
  switch (spec.scheme) {
    case Scheme::tikhonov:
      return {0.5, one, 1.0, 2.0};
    case Scheme::spectral_cutoff:
      return {1.0, one, 1.0, inf};
    case Scheme::iterated_tikhonov: {
      const double m = spec.iterations;
      return {std::sqrt(m), one, m, m};
    }
    case Scheme::landweber: {
      // (1 - c l)^k l^{beta/2} peaks near l = beta / (2 c k), which gives the
      // beta-dependent constant; g(0) = c / alpha gives c3.
      const double c = spec.step;
      return {std::sqrt(c),
              [c](double beta) { return std::max(std::pow(beta / (c * std::numbers::e), beta / 2.0), 1.0); },
              std::max(c, 1.0), inf};
    }
  }
  return {};
}

double norm_2inf(const DiscreteOperator& op_adjoint) {
  const Eigen::MatrixXd& k = op_adjoint.kernel();
  if (k.size() == 0) return 0.0;
  const Eigen::VectorXd rows = (k.array().square().rowwise() * op_adjoint.domain().weights().transpose().array())
                                   .rowwise()
                                   .sum();
  return std::sqrt(rows.maxCoeff());
}

}  // namespace nidreg
