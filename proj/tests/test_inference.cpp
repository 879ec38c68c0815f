#include <doctest.h>

#include <nidreg/dgp.hpp>
#include <nidreg/flir.hpp>
#include <nidreg/inference.hpp>
#include <nidreg/stats.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace nidreg;
using testutil::kind_of;

namespace {

flir::FlirSample doubled(const flir::FlirSample& s) {
  const auto n = static_cast<Eigen::Index>(s.n());
  Eigen::VectorXd y(2 * n);
  Eigen::MatrixXd z(2 * n, s.z().cols()), w(2 * n, s.w().cols());
  y << s.y(), s.y();
  z << s.z(), s.z();
  w << s.w(), s.w();
  return {y, z, w, s.grid()};
}

npiv::NpivSample doubled(const npiv::NpivSample& s) {
  const auto n = static_cast<Eigen::Index>(s.n());
  Eigen::VectorXd y(2 * n), z(2 * n), w(2 * n);
  y << s.y, s.y;
  z << s.z, s.z;
  w << s.w, s.w;
  return {y, z, w};
}

const Grid& grid100() {
  static const Grid g = make_grid(100);
  return g;
}

flir::SyntheticDgp strong_dgp() { return flir::SyntheticDgp({}, GridFunction::sample(grid100(), dgp::true_phi)); }

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("statistics helpers") {
  const std::vector<double> x{3, 1, 2, 5, 4};
  CHECK(stats::mean(x) == 3.0);
  CHECK(stats::variance(x) == 2.5);
  CHECK(stats::median(x) == 3.0);
  CHECK(stats::quantile(x, 0.25) == 2.0);
  CHECK(stats::quantile({1, 2}, 0.5) == 1.5);
  CHECK(stats::normal_cdf(0.0) == 0.5);
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(stats::ks_two_sample({0, 0}, {1, 1}) == 1.0);
  CHECK(stats::ks_one_sample({0.5}, [](double t) { return std::clamp(t, 0.0, 1.0); }) == doctest::Approx(0.5));
  const std::vector<double> xs{0, 1, 2, 3}, ys{1, 3, 5, 7};
  CHECK(stats::ols_slope(xs, ys) == doctest::Approx(2.0));
}

TEST_CASE("mixture from kernel matrices") {
  Eigen::MatrixXd h(2, 2);
  h << 0, 1, 1, 0;
  const auto mix = inference::ustat_mixture(h, 0.0);
  CHECK(mix.eigenvalues().sum() == doctest::Approx(0.0));
  CHECK(mix.eigenvalues().maxCoeff() == doctest::Approx(0.5));
  CHECK(mix.eigenvalues().minCoeff() == doctest::Approx(-0.5));

  Eigen::MatrixXd asym = h;
  asym(0, 1) = 2;
  CHECK(kind_of([&] { (void)inference::ustat_mixture(asym, 0.0); }) == ErrorKind::invalid_argument);

  // rank one kernel with eigenvalue one after scaling: chi2_1 - 1
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.5);
  const auto single = inference::ustat_mixture(4.0 * v * v.transpose(), 0.0).truncated(1.0);
  REQUIRE(single.eigenvalues().size() == 1);
  CHECK(single.eigenvalues()[0] == doctest::Approx(1.0));
  const auto draws = single.draw(100000, 3);
  CHECK(std::abs(stats::mean(draws)) < 4 * std::sqrt(2.0 / 1e5));
  CHECK(std::abs(stats::variance(draws) - 2.0) < 0.1);
}

TEST_CASE("mixture offset and moments") {
  const inference::ChiSqMixture base(Eigen::Vector3d(0.8, -0.3, 0.1), 0.0);
  const inference::ChiSqMixture shifted(Eigen::Vector3d(0.8, -0.3, 0.1), 1.25);
  const auto a = base.draw(1000, 9);
  const auto b = shifted.draw(1000, 9);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] - a[i] == doctest::Approx(1.25).epsilon(1e-12));

  const auto d = shifted.draw(100000, 10);
  const double var = shifted.variance();
  CHECK(var == doctest::Approx(2 * (0.64 + 0.09 + 0.01)));
  CHECK(std::abs(stats::mean(d) - shifted.mean()) < 4 * std::sqrt(var / 1e5));
  // var of the sample variance for a mixture: (kurtosis-based) bound via fourth cumulant 48 sum lambda^4
  const double l4 = std::pow(0.8, 4) + std::pow(0.3, 4) + std::pow(0.1, 4);
  const double se_var = std::sqrt((48 * l4 + 2 * var * var) / 1e5);
  CHECK(std::abs(stats::variance(d) - var) < 4 * se_var);

  const auto t = base.truncated(0.8);
  CHECK(t.eigenvalues().size() == 1);
  CHECK(base.truncated(1.0).eigenvalues().size() == 3);
}

TEST_CASE("bilinear kernel mixture agrees with the full matrix") {
  Rng rng(4);
  const Eigen::MatrixXd g = testutil::random_matrix(60, 5, rng);
  Eigen::VectorXd a(60), b(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  const Eigen::MatrixXd inner_products = g * g.transpose();
  const Eigen::MatrixXd h = 0.5 * (a * b.transpose() + b * a.transpose()).cwiseProduct(inner_products);
  Eigen::VectorXd full = inference::ustat_mixture(h, 0.0).eigenvalues();
  const Eigen::VectorXd fast = inference::bilinear_ustat_mixture(g, a, b, 0.0).eigenvalues();
  REQUIRE(fast.size() == 10);
  // the n x n spectrum is the block spectrum padded with zeros
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(60);
  padded.head(10) = fast;
  std::sort(full.data(), full.data() + full.size());
  std::sort(padded.data(), padded.data() + padded.size());
  CHECK((full - padded).cwiseAbs().maxCoeff() < 1e-8 * full.cwiseAbs().maxCoeff());
}

TEST_CASE("FLIR band with zero residuals collapses") {
  const auto d = strong_dgp();
  const auto s = d.sample(200, 1);
  const auto fit = GridFunction::sample(grid100(), [](double x) { return std::cos(x); });
  const Eigen::VectorXd y = s.z() * grid100().weights().cwiseProduct(fit.values());
  const flir::FlirSample exact(y, s.z(), s.w(), s.grid());
  const auto band = inference::flir_confband(exact, fit, 0.05, 0.05, 0.0);
  CHECK(band.degenerate);
  CHECK(band.half_width == 0.0);
  CHECK(band.covers(fit));
}

TEST_CASE("FLIR band formula") {
  const auto d = strong_dgp();
  const auto s = d.sample(300, 2);
  const double a = 0.02;
  const auto fit = flir::flir_fit(s, FilterSpec::tikhonov(a));
  const auto b0 = inference::flir_confband(s, fit, a, 0.05, 0.1);
  const auto b1 = inference::flir_confband(s, fit, a, 0.05, 0.2);
  CHECK(b1.half_width - b0.half_width == doctest::Approx(0.1 / (a * std::sqrt(300.0))).epsilon(1e-10));
  CHECK(!b0.degenerate);
  CHECK(b0.critical_value > 0);

  // higher confidence, larger critical value and band
  const auto wide = inference::flir_confband(s, fit, a, 0.01, 0.1);
  CHECK(wide.critical_value > b0.critical_value);
  CHECK(wide.half_width > b0.half_width);

  // duplicating the sample keeps every plug-in and divides q by sqrt 2
  const auto bd = inference::flir_confband(doubled(s), fit, a, 0.05, 0.1);
  CHECK(bd.half_width == doctest::Approx(b0.half_width / std::sqrt(2.0)).epsilon(1e-8));

  inference::SimulationSettings more;
  more.draws = 20000;
  const auto bm = inference::flir_confband(s, fit, a, 0.05, 0.0, more);
  const auto bl = inference::flir_confband(s, fit, a, 0.05, 0.0);
  CHECK(std::abs(bm.critical_value / bl.critical_value - 1) < 0.02);

  CHECK(kind_of([&] { (void)inference::flir_confband(s, fit, 0.0, 0.05, 0.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { (void)inference::flir_confband(s, fit, a, 1.0, 0.0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { (void)inference::flir_confband(s, fit, a, 0.05, -1.0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("NPIV band formula") {
  const dgp::NidDensity density({.j0 = 2});
  const auto s = dgp::sample(density, 300, 3);
  const npiv::KernelSpec k;
  const double a = 0.003;
  const auto fit = npiv::npiv_fit(s, k, FilterSpec::tikhonov(a), grid100());
  const auto b = inference::npiv_confband(s, fit, k, a, 0.05, 0.0);
  CHECK(b.half_width > 0);
  CHECK(b.level == doctest::Approx(0.95));

  const auto bd = inference::npiv_confband(doubled(s), fit, k, a, 0.05, 0.0);
  CHECK(bd.critical_value == doctest::Approx(b.critical_value).epsilon(1e-8));
  CHECK(bd.half_width < b.half_width);

  const auto loose = inference::npiv_confband(s, fit, k, a, 0.999, 0.0);
  CHECK(loose.critical_value < b.critical_value);
  CHECK(loose.half_width < b.half_width);
  const auto c1 = inference::npiv_confband(s, fit, k, a, 0.05, 0.1);
  CHECK(c1.half_width > b.half_width);

  inference::SimulationSettings more;
  more.draws = 20000;
  const auto bm = inference::npiv_confband(s, fit, k, a, 0.05, 0.0, more);
  CHECK(std::abs(bm.critical_value / b.critical_value - 1) < 0.02);
}

TEST_CASE("functional interval") {
  const auto d = strong_dgp();
  const auto s = d.sample(400, 5);
  const auto mu = trig_basis(1, grid100());
  const auto spec = FilterSpec::tikhonov(0.05 / std::sqrt(400.0));
  const auto ci = inference::functional_ci(s, mu, spec, 0.05);
  CHECK(ci.lower < ci.estimate);
  CHECK(ci.estimate < ci.upper);
  CHECK(ci.estimate == doctest::Approx(inner(flir::flir_fit(s, spec), mu)).epsilon(1e-12));
  CHECK((ci.upper - ci.lower) * ci.pi_hat == doctest::Approx(2 * stats::normal_quantile(0.975)));

  const auto cd = inference::functional_ci(doubled(s), mu, spec, 0.05);
  CHECK(cd.upper - cd.lower == doctest::Approx((ci.upper - ci.lower) / std::sqrt(2.0)).epsilon(1e-8));

  CHECK(kind_of([&] { (void)inference::functional_ci(s, GridFunction::zero(grid100()), spec, 0.05); }) ==
        ErrorKind::degenerate_functional);
  CHECK(kind_of([&] { (void)inference::functional_ci(s, mu, FilterSpec::spectral_cutoff(0.01), 0.05); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("functional interval coverage") {
  const auto d = strong_dgp();
  const auto mu = trig_basis(1, grid100());
  const double target = inner(d.best_approximation(), mu);
  const auto spec = FilterSpec::tikhonov(0.05 / std::sqrt(2000.0));
  int hits = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto ci = inference::functional_ci(d.sample(2000, 7000 + static_cast<std::uint64_t>(r)), mu, spec, 0.05);
    hits += ci.lower <= target && target <= ci.upper;
  }
  const double cover = hits / double(reps);
  CHECK(cover >= 0.90);
  CHECK(cover <= 0.98);
}

TEST_CASE("independence design") {
  const auto a = inference::sample_independent({}, 500, 3);
  const auto b = inference::sample_independent({}, 500, 3);
  CHECK(a.y == b.y);
  CHECK(a.z.minCoeff() >= 0.0);
  CHECK(a.w.maxCoeff() <= 1.0);
  inference::IndependenceDesign quiet;
  quiet.noise_sd = 0.0;
  const auto c = inference::sample_independent(quiet, 50, 3);
  for (Eigen::Index i = 0; i < 50; ++i) CHECK(c.y[i] == doctest::Approx(trig_basis_value(3, c.z[i])));
}

TEST_CASE("degenerate limit check basics") {
  inference::LimitCheckConfig cfg;
  cfg.n = 300;
  cfg.reps = 20;
  cfg.mixture_sample = 2000;
  cfg.mixture_draws = 5000;
  const auto mu0 = trig_basis(3, grid100());
  CHECK(cfg.alpha() == doctest::Approx(5.0 * std::pow(300.0, -2.0 / 3.0)));

  const auto zero = inference::degenerate_limit_check(cfg, GridFunction::zero(grid100()));
  for (double v : zero.statistics) CHECK(v == 0.0);
  CHECK(zero.ks == 0.0);

  const auto one = inference::degenerate_limit_check(cfg, mu0);
  const auto two = inference::degenerate_limit_check(cfg, 2.0 * mu0);
  REQUIRE(one.statistics.size() == 20);
  for (std::size_t r = 0; r < 20; ++r)
    CHECK(two.statistics[r] == doctest::Approx(2.0 * one.statistics[r]).epsilon(1e-12));
  CHECK(one.eigen_retained >= 1);
  CHECK(one.ks >= 0.0);
  CHECK(one.ks <= 1.0);

  cfg.threads = 3;
  const auto threaded = inference::degenerate_limit_check(cfg, mu0);
  CHECK(threaded.statistics == one.statistics);
  CHECK(threaded.ks == one.ks);
}

}  // TEST_SUITE
