#include "nidreg/inference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nidreg/error.hpp"
#include "nidreg/parallel.hpp"
#include "nidreg/random.hpp"
#include "nidreg/stats.hpp"

namespace nidreg::inference {

namespace {

// Sample offsets reserved for auxiliary draws so they never collide with
// replication seeds seed + r.
constexpr std::uint64_t kLawSampleOffset = 1ULL << 40;
constexpr std::uint64_t kLawDrawOffset = (1ULL << 40) + 1;

void check_band_args(double alpha, double gamma, double c_const) {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::invalid_argument, "alpha must be positive");
  require(gamma > 0.0 && gamma < 1.0, ErrorKind::invalid_argument, "gamma must lie in (0,1)");
  require(c_const >= 0.0 && std::isfinite(c_const), ErrorKind::invalid_argument, "c_const must be nonnegative");
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::decomposition, "symmetric eigendecomposition failed");
  return es.eigenvalues();
}

// (1 - gamma) quantile of max_a |G_a| for G ~ N(0, cov).
double sup_gaussian_quantile(const Eigen::MatrixXd& cov, double gamma, const SimulationSettings& sim) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) fail(ErrorKind::decomposition, "covariance eigendecomposition failed");
  const Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) return 0.0;
  // Eigenvalues come sorted ascending; keep the leading ones up to 1 - 1e-6 of the trace.
  Eigen::Index first = lambda.size() - 1;
  double kept = lambda[first];
  while (first > 0 && kept < (1.0 - 1e-6) * total) kept += lambda[--first];
  const Eigen::Index r = lambda.size() - first;
  const Eigen::MatrixXd factor =
      es.eigenvectors().rightCols(r) * lambda.tail(r).cwiseSqrt().asDiagonal();
  Rng rng(sim.seed);
  std::vector<double> sups(sim.draws);
  Eigen::VectorXd xi(r);
  for (auto& s : sups) {
    for (Eigen::Index j = 0; j < r; ++j) xi[j] = rng.normal();
    s = (factor * xi).cwiseAbs().maxCoeff();
  }
  return stats::quantile(std::move(sups), 1.0 - gamma);
}

// Interpolation weights of x on the grid nodes, constant beyond the ends.
std::pair<Eigen::Index, double> bracket(const Grid& grid, double x) {
  const auto& p = grid.points();
  const Eigen::Index m = p.size();
  if (x <= p[0]) return {0, 0.0};
  if (x >= p[m - 1]) return {m - 2, 1.0};
  const double h = p[1] - p[0];
  auto j = static_cast<Eigen::Index>(std::floor((x - p[0]) / h));
  j = std::clamp<Eigen::Index>(j, 0, m - 2);
  return {j, (x - p[j]) / h};
}

}  // namespace

bool ConfBand::covers(const GridFunction& f) const {
  check_same_grid(center.grid(), f.grid());
  return (f.values() - center.values()).cwiseAbs().maxCoeff() <= half_width;
}

ChiSqMixture::ChiSqMixture(Eigen::VectorXd eigenvalues, double offset)
    : eigenvalues_(std::move(eigenvalues)), offset_(offset) {
  require(eigenvalues_.allFinite() && std::isfinite(offset_), ErrorKind::invalid_argument,
          "mixture parameters must be finite");
}

std::vector<double> ChiSqMixture::draw(std::size_t count, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> out(count);
  for (auto& v : out) {
    double s = offset_;
    for (Eigen::Index j = 0; j < eigenvalues_.size(); ++j) {
      const double z = rng.normal();
      s += eigenvalues_[j] * (z * z - 1.0);
    }
    v = s;
  }
  return out;
}

ChiSqMixture ChiSqMixture::truncated(double energy) const {
  require(energy > 0.0 && energy <= 1.0, ErrorKind::invalid_argument, "energy fraction must lie in (0,1]");
  std::vector<double> v(eigenvalues_.data(), eigenvalues_.data() + eigenvalues_.size());
  std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  const double total = std::accumulate(v.begin(), v.end(), 0.0, [](double s, double x) { return s + x * x; });
  std::size_t keep = 0;
  double acc = 0.0;
  while (keep < v.size() && acc < energy * total) {
    acc += v[keep] * v[keep];
    ++keep;
  }
  return ChiSqMixture(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(keep)), offset_);
}

ChiSqMixture ustat_mixture(const Eigen::MatrixXd& h_matrix, double offset) {
  require(h_matrix.rows() == h_matrix.cols() && h_matrix.rows() > 0, ErrorKind::invalid_argument,
          "kernel matrix must be square and nonempty");
  const double scale = std::max(1.0, h_matrix.cwiseAbs().maxCoeff());
  require((h_matrix - h_matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorKind::invalid_argument,
          "kernel matrix must be symmetric");
  return ChiSqMixture(symmetric_eigenvalues(h_matrix / static_cast<double>(h_matrix.rows())), offset);
}

ChiSqMixture bilinear_ustat_mixture(const Eigen::MatrixXd& features, const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& b, double offset) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  require(n > 0 && a.size() == n && b.size() == n, ErrorKind::invalid_argument,
          "feature rows and weights must have equal length");
  Eigen::MatrixXd blocks(2 * p, n);
  blocks.topRows(p) = features.transpose() * a.asDiagonal();
  blocks.bottomRows(p) = features.transpose() * b.asDiagonal();
  const Eigen::MatrixXd gram = blocks * blocks.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) fail(ErrorKind::decomposition, "gram eigendecomposition failed");
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd swap = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  swap.topRightCorner(p, p).setIdentity();
  swap.bottomLeftCorner(p, p).setIdentity();
  const Eigen::MatrixXd s = 0.5 * root * swap * root;
  return ChiSqMixture(symmetric_eigenvalues(0.5 * (s + s.transpose())), offset);
}

ConfBand flir_confband(const flir::FlirSample& sample, const GridFunction& fit, double alpha, double gamma,
                       double c_const, const SimulationSettings& sim) {
  check_band_args(alpha, gamma, c_const);
  check_same_grid(sample.grid(), fit.grid());
  const Grid& grid = sample.grid();
  const auto n = static_cast<double>(sample.n());
  const Eigen::VectorXd resid = sample.y() - sample.z() * grid.weights().cwiseProduct(fit.values());

  double c = 0.0;
  const bool degenerate = resid.cwiseAbs().maxCoeff() == 0.0;
  if (!degenerate) {
    const Eigen::MatrixXd eta = resid.asDiagonal() * sample.w() * grid.weights().cwiseSqrt().asDiagonal();
    const Eigen::MatrixXd cov = eta.transpose() * eta / n;
    const Eigen::VectorXd lambda = symmetric_eigenvalues(cov).cwiseMax(0.0);
    // ||G||^2 = sum lambda_j chi2_j, i.e. the mixture with offset sum lambda_j.
    const ChiSqMixture law = ChiSqMixture(lambda, lambda.sum()).truncated(1.0 - 1e-9);
    c = stats::quantile(law.draw(sim.draws, sim.seed), 1.0 - gamma);
  }
  const double norm = norm_2inf(adjoint(flir::estimate_K(sample)));
  const double q = (norm * std::sqrt(c) + c_const) / (alpha * std::sqrt(n));
  return ConfBand{fit, q, 1.0 - gamma, c, degenerate};
}

ConfBand npiv_confband(const npiv::NpivSample& sample, const GridFunction& fit, const npiv::KernelSpec& kspec,
                       double alpha, double gamma, double c_const, const SimulationSettings& sim) {
  check_band_args(alpha, gamma, c_const);
  kspec.validate();
  const Grid& grid = fit.grid();
  const Eigen::Index n = static_cast<Eigen::Index>(sample.n());
  Eigen::VectorXd resid(n);
  for (Eigen::Index i = 0; i < n; ++i) resid[i] = sample.y[i] - npiv::interpolate(grid, fit.values(), sample.z[i]);

  const npiv::DensityEstimate density = npiv::kde_joint(sample, kspec, grid);
  double c = 0.0;
  const bool degenerate = resid.cwiseAbs().maxCoeff() == 0.0;
  if (!degenerate) {
    // F(a, i) = f_hat(z_a, W_i) |u_i|
    Eigen::MatrixXd f(density.values.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto [j, t] = bracket(density.w_grid, sample.w[i]);
      f.col(i) = std::abs(resid[i]) * ((1.0 - t) * density.values.col(j) + t * density.values.col(j + 1));
    }
    const Eigen::MatrixXd cov = f * f.transpose() / static_cast<double>(n);
    c = sup_gaussian_quantile(cov, gamma, sim);
  }
  const double norm = norm_2inf(adjoint(npiv::build_operator(density)));
  const double q =
      (norm / 2.0 + std::sqrt(alpha) + c_const) / (std::pow(alpha, 1.5) * std::sqrt(static_cast<double>(n))) * c;
  return ConfBand{fit, q, 1.0 - gamma, c, degenerate};
}

FunctionalInterval functional_ci(const flir::FlirSample& sample, const GridFunction& mu, const FilterSpec& spec,
                                 double gamma) {
  require(spec.scheme == Scheme::tikhonov, ErrorKind::invalid_argument, "functional_ci requires Tikhonov");
  spec.validate();
  require(gamma > 0.0 && gamma < 1.0, ErrorKind::invalid_argument, "gamma must lie in (0,1)");
  check_same_grid(sample.grid(), mu.grid());
  const Grid& grid = sample.grid();
  const Eigen::VectorXd sw = grid.weights().cwiseSqrt();
  const auto n = static_cast<double>(sample.n());

  const DiscreteOperator k_hat = flir::estimate_K(sample);
  const GridFunction fit = regularize(k_hat, flir::estimate_r(sample), spec);
  const Eigen::MatrixXd kw = k_hat.whitened();
  Eigen::MatrixXd normal = kw.transpose() * kw;
  normal.diagonal().array() += spec.alpha;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) fail(ErrorKind::decomposition, "Cholesky factorization failed");
  const Eigen::VectorXd v = kw * llt.solve(sw.cwiseProduct(mu.values()));

  const Eigen::VectorXd resid = sample.y() - sample.z() * grid.weights().cwiseProduct(fit.values());
  const Eigen::VectorXd proj = sample.w() * sw.cwiseProduct(v);
  const double sd = std::sqrt(resid.cwiseProduct(proj).squaredNorm() / n);
  const double scale =
      l2_norm(mu) * std::sqrt((resid.array().square() * (sample.w() * sw.asDiagonal()).rowwise().squaredNorm().array())
                                  .sum() /
                              n);
  if (!(sd > 1e-10 * scale) || !std::isfinite(sd)) {
    fail(ErrorKind::degenerate_functional,
         "functional has no identified component under the plug-in operator; use degenerate_limit_check");
  }
  FunctionalInterval out;
  out.estimate = inner(fit, mu);
  out.pi_hat = std::sqrt(n) / sd;
  const double half = stats::normal_quantile(1.0 - gamma / 2.0) / out.pi_hat;
  out.lower = out.estimate - half;
  out.upper = out.estimate + half;
  return out;
}

npiv::NpivSample sample_independent(const IndependenceDesign& design, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::invalid_argument, "sample size must be positive");
  require(design.noise_sd >= 0.0, ErrorKind::invalid_argument, "noise_sd must be nonnegative");
  Rng rng(seed);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::VectorXd y(ni), z(ni), w(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    z[i] = rng.uniform();
    w[i] = rng.uniform();
  }
  for (Eigen::Index i = 0; i < ni; ++i) y[i] = design.structural(z[i]) + design.noise_sd * rng.normal();
  return npiv::NpivSample(std::move(y), std::move(z), std::move(w));
}

double LimitCheckConfig::alpha() const {
  require(alpha_scale > 0.0 && n >= 1, ErrorKind::invalid_argument, "alpha rule needs a positive scale");
  return alpha_scale * std::pow(static_cast<double>(n), alpha_exponent);
}

ChiSqMixture degenerate_limit_law(const LimitCheckConfig& config, const GridFunction& mu0) {
  config.kspec.validate();
  const Grid grid = Grid::midpoint(config.grid_size);
  check_same_grid(grid, mu0.grid());
  const Eigen::VectorXd& wts = grid.weights();
  const Eigen::VectorXd sw = wts.cwiseSqrt();

  const npiv::NpivSample big =
      sample_independent(config.design, config.mixture_sample, replication_seed(config.seed, kLawSampleOffset));
  const Eigen::VectorXd m =
      npiv::kernel_weights(config.kspec.kernel, config.kspec.h_z, big.z, grid) * wts.cwiseProduct(mu0.values());
  const Eigen::MatrixXd k = npiv::kernel_weights(config.kspec.kernel, config.kspec.h_w, big.w, grid);

  // Population mean of the smoothed instrument, E k(W)(w) for W uniform.
  const dgp::Quadrature1d q = dgp::gauss_legendre_unit(40);
  Eigen::VectorXd kbar = npiv::kernel_weights(config.kspec.kernel, config.kspec.h_w, q.nodes, grid).transpose() * q.weights;
  kbar /= std::sqrt(kbar.cwiseProduct(wts).dot(kbar));
  // k0 = k minus its component along E k(W); rows scaled to Euclidean = L2.
  const Eigen::VectorXd along = k * wts.cwiseProduct(kbar);
  const Eigen::MatrixXd k0 = (k - along * kbar.transpose()) * sw.asDiagonal();

  const double offset =
      (big.y.array() * m.array() * k0.rowwise().squaredNorm().array()).sum() / static_cast<double>(big.n());
  return bilinear_ustat_mixture(k0, big.y, m, offset);
}

LimitCheckReport degenerate_limit_check(const LimitCheckConfig& config, const GridFunction& mu0) {
  require(config.reps >= 1, ErrorKind::invalid_argument, "reps must be positive");
  const Grid grid = Grid::midpoint(config.grid_size);
  check_same_grid(grid, mu0.grid());
  LimitCheckReport report;
  report.alpha = config.alpha();
  const FilterSpec spec = FilterSpec::tikhonov(report.alpha);

  // Best approximation under the independence design: projection onto constants.
  const GridFunction phi = GridFunction::sample(grid, config.design.structural);
  const GridFunction phi1 = GridFunction::constant(grid, inner(phi, GridFunction::constant(grid, 1.0)));
  const double scale = static_cast<double>(config.n) * report.alpha;

  report.statistics.assign(config.reps, 0.0);
  parallel_for(config.reps, config.threads, [&](std::size_t r) {
    const npiv::NpivSample s = sample_independent(config.design, config.n, replication_seed(config.seed, r));
    const GridFunction fit = npiv::npiv_fit(s, config.kspec, spec, grid);
    report.statistics[r] = scale * inner(fit - phi1, mu0);
  });

  report.mixture = degenerate_limit_law(config, mu0).truncated(config.energy);
  report.eigen_retained = static_cast<std::size_t>(report.mixture.eigenvalues().size());
  report.ks = stats::ks_two_sample(report.statistics,
                                   report.mixture.draw(config.mixture_draws,
                                                       replication_seed(config.seed, kLawDrawOffset)));
  return report;
}

}  // namespace nidreg::inference
