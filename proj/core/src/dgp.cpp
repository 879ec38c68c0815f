#include "nidreg/dgp.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "nidreg/random.hpp"

namespace nidreg::dgp {

namespace {

constexpr int kFineGrid = 800;
constexpr double kEnvelopeSafety = 1.01;

// phi_1..phi_count at x, via the angle-addition recurrence.
void trig_values(double x, int count, double* out) {
  out[0] = 1.0;
  const double c1 = std::cos(2.0 * std::numbers::pi * x);
  const double s1 = std::sin(2.0 * std::numbers::pi * x);
  double c = 1.0, s = 0.0;
  for (int j = 2; j <= count; j += 2) {
    const double cn = c * c1 - s * s1;
    const double sn = s * c1 + c * s1;
    c = cn;
    s = sn;
    out[j - 1] = std::numbers::sqrt2 * c;
    if (j + 1 <= count) out[j] = std::numbers::sqrt2 * s;
  }
}

}  // namespace

void DgpConfig::validate() const {
  require(k_max >= 1, ErrorKind::invalid_argument, "k_max must be positive");
  require(!j0 || *j0 >= 1, ErrorKind::invalid_argument, "j0 must be positive");
  require(cov[0] > 0.0 && cov[2] > 0.0 && cov[0] * cov[2] - cov[1] * cov[1] > 0.0, ErrorKind::invalid_argument,
          "covariance must be symmetric positive definite");
}

TruncatedNormal::TruncatedNormal(std::array<double, 2> mean, std::array<double, 3> cov) : mean_(mean) {
  const double det = cov[0] * cov[2] - cov[1] * cov[1];
  require(cov[0] > 0.0 && det > 0.0, ErrorKind::invalid_argument, "covariance must be positive definite");
  inv00_ = cov[2] / det;
  inv01_ = -cov[1] / det;
  inv11_ = cov[0] / det;
  norm_ = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const Quadrature1d q = gauss_legendre_unit(40);
  double mass = 0.0;
  for (Eigen::Index a = 0; a < q.nodes.size(); ++a) {
    for (Eigen::Index b = 0; b < q.nodes.size(); ++b) {
      mass += q.weights[a] * q.weights[b] * untruncated(q.nodes[a], q.nodes[b]);
    }
  }
  mass_ = mass;
}

double TruncatedNormal::untruncated(double z, double w) const noexcept {
  const double dz = z - mean_[0];
  const double dw = w - mean_[1];
  return norm_ * std::exp(-0.5 * (inv00_ * dz * dz + 2.0 * inv01_ * dz * dw + inv11_ * dw * dw));
}

double TruncatedNormal::operator()(double z, double w) const noexcept {
  if (z < 0.0 || z > 1.0 || w < 0.0 || w > 1.0) return 0.0;
  return untruncated(z, w) / mass_;
}

double truncated_normal_density(double z, double w) {
  static const TruncatedNormal tn(DgpConfig{}.mean, DgpConfig{}.cov);
  return tn(z, w);
}

Quadrature1d gauss_legendre_unit(int panels) {
  using rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = rule::abscissa();
  const auto& weights = rule::weights();
  std::vector<double> xs, ws;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      const double x = abscissa[i];
      const double w = weights[i];
      if (x == 0.0) {
        xs.push_back(mid);
        ws.push_back(w * h / 2);
      } else {
        xs.push_back(mid - x * h / 2);
        ws.push_back(w * h / 2);
        xs.push_back(mid + x * h / 2);
        ws.push_back(w * h / 2);
      }
    }
  }
  Quadrature1d q;
  q.nodes = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  q.weights = Eigen::Map<Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  return q;
}

NidDensity::NidDensity(const DgpConfig& config) : config_(config) {
  config_.validate();
  const TruncatedNormal tn(config_.mean, config_.cov);
  const int jz = config_.z_terms();
  const int kw = config_.k_max;
  const Quadrature1d q = gauss_legendre_unit(40);
  const Eigen::Index nq = q.nodes.size();
  Eigen::MatrixXd f(nq, nq);
  for (Eigen::Index a = 0; a < nq; ++a) {
    for (Eigen::Index b = 0; b < nq; ++b) f(a, b) = tn(q.nodes[a], q.nodes[b]);
  }
  Eigen::MatrixXd bz(nq, jz), bw(nq, kw);
  std::vector<double> buf(static_cast<std::size_t>(std::max(jz, kw)));
  for (Eigen::Index a = 0; a < nq; ++a) {
    trig_values(q.nodes[a], std::max(jz, kw), buf.data());
    for (int j = 0; j < jz; ++j) bz(a, j) = buf[static_cast<std::size_t>(j)];
    for (int k = 0; k < kw; ++k) bw(a, k) = buf[static_cast<std::size_t>(k)];
  }
  coef_ = bz.transpose() * q.weights.asDiagonal() * f * q.weights.asDiagonal() * bw;

  // Clip negative parts and renormalize on a fine midpoint grid.
  const Grid fine = Grid::midpoint(kFineGrid);
  const npiv::DensityEstimate raw_tab = [&] {
    c_ = 1.0;
    max_ = 0.0;
    Eigen::MatrixXd v(kFineGrid, kFineGrid);
    Eigen::MatrixXd fz(kFineGrid, jz), fw(kFineGrid, kw);
    for (int a = 0; a < kFineGrid; ++a) {
      trig_values(fine.points()[a], std::max(jz, kw), buf.data());
      for (int j = 0; j < jz; ++j) fz(a, j) = buf[static_cast<std::size_t>(j)];
      for (int k = 0; k < kw; ++k) fw(a, k) = buf[static_cast<std::size_t>(k)];
    }
    v = fz * coef_ * fw.transpose();
    return npiv::DensityEstimate(std::move(v), fine, fine);
  }();
  const Eigen::MatrixXd clipped = raw_tab.values.cwiseMax(0.0);
  clipped_ = static_cast<double>((raw_tab.values.array() < 0.0).count()) /
             static_cast<double>(raw_tab.values.size());
  const double mass = clipped.sum() / (static_cast<double>(kFineGrid) * kFineGrid);
  if (!(mass > 0.0)) fail(ErrorKind::degenerate_density, "projected density has no positive mass");
  c_ = 1.0 / mass;
  max_ = c_ * clipped.maxCoeff();
}

double NidDensity::raw(double z, double w) const {
  const int jz = static_cast<int>(coef_.rows());
  const int kw = static_cast<int>(coef_.cols());
  double bz[64], bw[64];
  if (jz > 64 || kw > 64) {
    double s = 0.0;
    for (int j = 1; j <= jz; ++j) {
      for (int k = 1; k <= kw; ++k) s += coef_(j - 1, k - 1) * trig_basis_value(j, z) * trig_basis_value(k, w);
    }
    return s;
  }
  trig_values(z, jz, bz);
  trig_values(w, kw, bw);
  double s = 0.0;
  for (int k = 0; k < kw; ++k) {
    double col = 0.0;
    for (int j = 0; j < jz; ++j) col += coef_(j, k) * bz[j];
    s += col * bw[k];
  }
  return s;
}

double NidDensity::operator()(double z, double w) const {
  if (z < 0.0 || z > 1.0 || w < 0.0 || w > 1.0) return 0.0;
  return c_ * std::max(0.0, raw(z, w));
}

npiv::DensityEstimate tabulate(const NidDensity& density, const Grid& grid) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd v(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) v(a, b) = density(grid.points()[a], grid.points()[b]);
  }
  return npiv::DensityEstimate(std::move(v), grid, grid);
}

npiv::DensityEstimate build_nid_density(const DgpConfig& config, const Grid& grid) {
  config.validate();
  const auto guard = static_cast<int>(grid.size() / 4);
  if (config.z_terms() > guard || config.k_max > guard) {
    fail(ErrorKind::invalid_argument, "j0 and k_max must not exceed m/4 = " + std::to_string(guard) +
                                          " (aliasing guard)");
  }
  npiv::DensityEstimate tab = tabulate(NidDensity(config), grid);
  // The constant C was fixed on the fine grid; restate it on this grid's quadrature.
  const double mass = tab.mass();
  if (!(mass > 0.0)) fail(ErrorKind::degenerate_density, "projected density has no positive mass on the grid");
  tab.values /= mass;
  return tab;
}

double true_phi(double z) noexcept {
  // Horner form of z^10 - z^9 + z^8 - z^7 + z^6 - z^5 + z^4 + z^3 - z^2 - z
  static constexpr double c[] = {1, -1, 1, -1, 1, -1, 1, 1, -1, -1, 0};
  double v = 0.0;
  for (double ci : c) v = v * z + ci;
  return v;
}

GridFunction best_approx(const DgpConfig& config, const Grid& grid) {
  const GridFunction phi = GridFunction::sample(grid, true_phi);
  if (!config.j0) return phi;
  std::set<int> idx;
  for (int j = 1; j <= *config.j0; ++j) idx.insert(j);
  return project_onto_span(phi, BasisSpec{BasisSpec::Kind::trigonometric, *config.j0}, idx);
}

double envelope_height(const NidDensity& density) noexcept { return kEnvelopeSafety * density.max_value(); }

npiv::NpivSample sample_with_stats(const NidDensity& density, std::size_t n, std::uint64_t seed,
                                   const Structural& structural, RejectionStats& stats) {
  require(n >= 1, ErrorKind::invalid_argument, "sample size must be positive");
  Rng rng(seed);
  const double envelope = envelope_height(density);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::VectorXd y(ni), z(ni), w(ni);
  stats = {};
  for (Eigen::Index i = 0; i < ni;) {
    const double zc = rng.uniform();
    const double wc = rng.uniform();
    const double u = rng.uniform() * envelope;
    ++stats.proposals;
    const double f = density(zc, wc);
    if (f > envelope) fail(ErrorKind::internal, "rejection envelope violated");
    if (u < f) {
      z[i] = zc;
      w[i] = wc;
      ++i;
    }
  }
  stats.accepted = n;
  for (Eigen::Index i = 0; i < ni; ++i) y[i] = structural(z[i]) + rng.normal() * z[i];
  return npiv::NpivSample(std::move(y), std::move(z), std::move(w));
}

npiv::NpivSample sample(const NidDensity& density, std::size_t n, std::uint64_t seed, const Structural& structural) {
  RejectionStats stats;
  return sample_with_stats(density, n, seed, structural, stats);
}

npiv::NpivSample sample(const DgpConfig& config) { return sample(NidDensity(config), config.n, config.seed); }

}  // namespace nidreg::dgp
