#include "nidreg/flir.hpp"

#include <cmath>

#include "nidreg/random.hpp"

namespace nidreg::flir {

FlirSample::FlirSample(Eigen::VectorXd y, Eigen::MatrixXd z, Eigen::MatrixXd w, Grid grid)
    : y_(std::move(y)), z_(std::move(z)), w_(std::move(w)), grid_(std::move(grid)) {
  require(y_.size() >= 1, ErrorKind::invalid_argument, "empty FLIR sample");
  require(z_.rows() == y_.size() && w_.rows() == y_.size(), ErrorKind::invalid_argument,
          "Z and W must have one row per observation");
  require(static_cast<std::size_t>(z_.cols()) == grid_.size() &&
              static_cast<std::size_t>(w_.cols()) == grid_.size(),
          ErrorKind::grid_mismatch, "Z and W must be sampled on the sample grid");
  require(y_.allFinite() && z_.allFinite() && w_.allFinite(), ErrorKind::invalid_argument,
          "FLIR sample has non-finite entries");
}

GridFunction FlirSample::z_function(std::size_t i) const {
  return GridFunction(grid_, z_.row(static_cast<Eigen::Index>(i)).transpose());
}

GridFunction FlirSample::w_function(std::size_t i) const {
  return GridFunction(grid_, w_.row(static_cast<Eigen::Index>(i)).transpose());
}

FlirSample FlirSample::demeaned() const {
  Eigen::MatrixXd z = z_.rowwise() - z_.colwise().mean();
  Eigen::MatrixXd w = w_.rowwise() - w_.colwise().mean();
  return FlirSample(y_, std::move(z), std::move(w), grid_);
}

GridFunction estimate_r(const FlirSample& sample) {
  Eigen::VectorXd r = sample.w().transpose() * sample.y() / static_cast<double>(sample.n());
  return GridFunction(sample.grid(), std::move(r));
}

DiscreteOperator estimate_K(const FlirSample& sample) {
  Eigen::MatrixXd k = sample.w().transpose() * sample.z() / static_cast<double>(sample.n());
  return DiscreteOperator(std::move(k), sample.grid(), sample.grid());
}

GridFunction flir_fit(const FlirSample& sample, const FilterSpec& spec) {
  return regularize(estimate_K(sample), estimate_r(sample), spec);
}

SyntheticDgp::SyntheticDgp(SyntheticConfig config, GridFunction phi)
    : config_(config), phi_(std::move(phi)) {
  require(config_.terms >= 1, ErrorKind::invalid_argument, "need at least one series term");
  require(!config_.j0 || *config_.j0 >= 1, ErrorKind::invalid_argument, "j0 must be positive");
  require(2 * config_.terms <= static_cast<int>(phi_.size()), ErrorKind::invalid_argument,
          "grid too coarse for the requested number of series terms");
  basis_ = basis_matrix(BasisSpec{BasisSpec::Kind::trigonometric, config_.terms}, phi_.grid());
}

int SyntheticDgp::identified_terms() const noexcept {
  return config_.j0 ? std::min(*config_.j0, config_.terms) : config_.terms;
}

GridFunction SyntheticDgp::best_approximation() const {
  std::set<int> idx;
  for (int j = 1; j <= identified_terms(); ++j) idx.insert(j);
  return project_onto_span(phi_, BasisSpec{BasisSpec::Kind::trigonometric, config_.terms}, idx);
}

DiscreteOperator SyntheticDgp::population_operator() const {
  const int jj = identified_terms();
  Eigen::VectorXd var = Eigen::VectorXd::Zero(config_.terms);
  for (int j = 1; j <= jj; ++j) var[j - 1] = std::pow(static_cast<double>(j), -2.0 * config_.decay);
  Eigen::MatrixXd k = basis_ * var.asDiagonal() * basis_.transpose();
  return DiscreteOperator(std::move(k), phi_.grid(), phi_.grid());
}

FlirSample SyntheticDgp::sample(std::size_t n, std::uint64_t seed) const {
  require(n >= 1, ErrorKind::invalid_argument, "sample size must be positive");
  Rng rng(seed);
  const int t = config_.terms;
  const int jj = identified_terms();
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd xi(ni, t), nu(ni, t);
  Eigen::VectorXd u(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (int j = 0; j < t; ++j) xi(i, j) = rng.normal() * std::pow(j + 1.0, -config_.decay);
    for (int j = 0; j < t; ++j) nu(i, j) = rng.normal() * std::pow(j + 1.0, -config_.decay);
    u[i] = config_.noise_sd * rng.normal();
  }
  Eigen::MatrixXd wcoef = config_.instrument_noise * nu;
  wcoef.leftCols(jj) += xi.leftCols(jj);
  Eigen::MatrixXd z = xi * basis_.transpose();
  Eigen::MatrixXd w = wcoef * basis_.transpose();
  // <Z_i, phi> computed from the series coefficients on the grid
  const Eigen::VectorXd phi_coef = basis_.transpose() * phi_.grid().weights().cwiseProduct(phi_.values());
  Eigen::VectorXd y = xi * phi_coef + u;
  return FlirSample(std::move(y), std::move(z), std::move(w), phi_.grid());
}

}  // namespace nidreg::flir
