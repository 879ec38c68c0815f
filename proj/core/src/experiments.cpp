#include "nidreg/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "nidreg/error.hpp"
#include "nidreg/flir.hpp"
#include "nidreg/parallel.hpp"
#include "nidreg/random.hpp"
#include "nidreg/stats.hpp"

namespace nidreg::bench {

namespace {

constexpr std::uint64_t kBandSeedOffset = 1ULL << 41;
constexpr std::uint64_t kLimitSeedStride = 10'000'000;

void check_j0s(const std::vector<std::optional<int>>& j0s) {
  require(!j0s.empty(), ErrorKind::config, "j0 list is empty");
  for (const auto& j : j0s) require(!j || *j >= 1, ErrorKind::config, "j0 must be a positive integer or inf");
}

void check_ns(const std::vector<std::size_t>& ns) {
  require(!ns.empty(), ErrorKind::config, "sample size list is empty");
  for (auto n : ns) require(n >= 2, ErrorKind::config, "sample sizes must be at least 2");
}

// Grid resolution and the aliasing guard: j0 and k_max at most m / 4.
void check_design(const std::vector<std::optional<int>>& j0s, int k_max, std::size_t grid_size) {
  require(grid_size >= 4, ErrorKind::config, "grid_size must be at least 4");
  require(k_max >= 1, ErrorKind::config, "k_max must be positive");
  const auto guard = static_cast<int>(grid_size / 4);
  require(k_max <= guard, ErrorKind::config, "k_max exceeds grid_size / 4 (aliasing guard)");
  for (const auto& j : j0s) require(!j || *j <= guard, ErrorKind::config, "j0 exceeds grid_size / 4 (aliasing guard)");
}

double standard_error(const std::vector<double>& x) {
  return x.size() >= 2 ? std::sqrt(stats::variance(x) / static_cast<double>(x.size())) : 0.0;
}

dgp::DgpConfig design(const std::optional<int>& j0, int k_max) {
  dgp::DgpConfig c;
  c.j0 = j0;
  c.k_max = k_max;
  return c;
}

}  // namespace

double AlphaRule::at(std::size_t n) const {
  require(scale > 0.0 && std::isfinite(scale) && std::isfinite(exponent), ErrorKind::config,
          "alpha rule needs a positive finite scale");
  return scale * std::pow(static_cast<double>(n), exponent);
}

FilterSpec SchemeSpec::with_alpha(double alpha) const {
  switch (scheme) {
    case Scheme::tikhonov: return FilterSpec::tikhonov(alpha);
    case Scheme::spectral_cutoff: return FilterSpec::spectral_cutoff(alpha);
    case Scheme::iterated_tikhonov: return FilterSpec::iterated_tikhonov(iterations, alpha);
    case Scheme::landweber: return FilterSpec::landweber(step, alpha);
  }
  fail(ErrorKind::internal, "unknown scheme");
}

std::string j0_label(const std::optional<int>& j0) { return j0 ? std::to_string(*j0) : "inf"; }

void McConfig::validate() const {
  check_j0s(j0s);
  check_ns(ns);
  require(reps >= 1, ErrorKind::config, "reps must be positive");
  require(alpha > 0.0, ErrorKind::config, "alpha must be positive");
  check_design(j0s, k_max, grid_size);
  kspec.validate();
  scheme.with_alpha(alpha).validate();
}

McResult run_mc(const McConfig& config, int coefficient_count) {
  config.validate();
  const Grid grid = Grid::midpoint(config.grid_size);
  const auto m = static_cast<Eigen::Index>(grid.size());
  const FilterSpec spec = config.scheme.with_alpha(config.alpha);
  const BasisSpec basis{BasisSpec::Kind::trigonometric, coefficient_count};
  const Eigen::MatrixXd bmat = basis_matrix(basis, grid);
  const GridFunction phi = GridFunction::sample(grid, dgp::true_phi);

  McResult result;
  result.z = grid.points();
  for (const auto& j0 : config.j0s) {
    const dgp::DgpConfig dc = design(j0, config.k_max);
    (void)dgp::build_nid_density(dc, grid);  // enforces the aliasing guard
    const dgp::NidDensity density(dc);
    const GridFunction phi1 = dgp::best_approx(dc, grid);

    for (const std::size_t n : config.ns) {
      const std::size_t reps = config.reps;
      Eigen::MatrixXd fits(static_cast<Eigen::Index>(reps), m);
      std::vector<double> l2(reps), l2sq(reps), sup(reps);
      parallel_for(reps, config.threads, [&](std::size_t r) {
        const npiv::NpivSample s = dgp::sample(density, n, replication_seed(config.seed, r));
        const GridFunction fit = npiv::npiv_fit(s, config.kspec, spec, grid);
        const GridFunction err = fit - phi1;
        fits.row(static_cast<Eigen::Index>(r)) = fit.values().transpose();
        l2sq[r] = inner(err, err);
        l2[r] = std::sqrt(l2sq[r]);
        sup[r] = sup_norm(err);
      });

      McCell cell;
      cell.j0 = j0;
      cell.n = n;
      cell.scheme = config.scheme.scheme;
      cell.alpha = config.alpha;
      cell.h_z = config.kspec.h_z;
      cell.h_w = config.kspec.h_w;
      cell.reps = reps;
      cell.l2_mean = stats::mean(l2);
      cell.l2sq_mean = stats::mean(l2sq);
      cell.sup_mean = stats::mean(sup);
      cell.l2_se = standard_error(l2);
      cell.l2sq_se = standard_error(l2sq);
      cell.sup_se = standard_error(sup);
      cell.mean_fit = fits.colwise().mean().transpose();
      cell.lo.resize(m);
      cell.hi.resize(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        std::vector<double> col(fits.col(a).data(), fits.col(a).data() + fits.rows());
        cell.lo[a] = stats::quantile(col, 0.025);
        cell.hi[a] = stats::quantile(std::move(col), 0.975);
      }
      cell.phi = phi.values();
      cell.phi1 = phi1.values();

      const Eigen::MatrixXd coefs = fits * grid.weights().asDiagonal() * bmat;  // reps x count
      cell.coef_mean = coefs.colwise().mean().transpose();
      cell.coef_abs_mean = coefs.cwiseAbs().colwise().mean().transpose();
      cell.coef_se.resize(coefficient_count);
      for (int j = 0; j < coefficient_count; ++j) {
        std::vector<double> c(coefs.col(j).data(), coefs.col(j).data() + coefs.rows());
        cell.coef_se[j] = standard_error(c);
      }
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

void CoverageConfig::validate() const {
  check_j0s(j0s);
  check_ns(ns);
  require(reps >= 1, ErrorKind::config, "reps must be positive");
  require(!gammas.empty() && !c_consts.empty(), ErrorKind::config, "gamma and c_const lists must be nonempty");
  for (double g : gammas) require(g > 0.0 && g < 1.0, ErrorKind::config, "gamma must lie in (0,1)");
  for (double c : c_consts) require(c >= 0.0, ErrorKind::config, "c_const must be nonnegative");
  require(sim_draws >= 100, ErrorKind::config, "sim_draws must be at least 100");
  require(flir || npiv, ErrorKind::config, "no model selected");
  (void)flir_alpha.at(1);
  (void)npiv_alpha.at(1);
  check_design(j0s, k_max, grid_size);
  kspec.validate();
}

std::vector<CoverageRow> run_coverage(const CoverageConfig& config) {
  config.validate();
  const Grid grid = Grid::midpoint(config.grid_size);
  const GridFunction phi = GridFunction::sample(grid, dgp::true_phi);
  const std::size_t combos = config.gammas.size() * config.c_consts.size();
  std::vector<CoverageRow> rows;

  auto collect = [&](const std::string& model, const std::optional<int>& j0, std::size_t n, double alpha,
                     const std::vector<std::vector<char>>& covered, const std::vector<std::vector<double>>& width) {
    for (std::size_t g = 0; g < config.gammas.size(); ++g) {
      for (std::size_t c = 0; c < config.c_consts.size(); ++c) {
        const std::size_t k = g * config.c_consts.size() + c;
        CoverageRow row{model, j0, n, config.gammas[g], config.c_consts[c], alpha, config.reps, 0.0, 0.0};
        for (std::size_t r = 0; r < config.reps; ++r) {
          row.coverage += covered[r][k];
          row.mean_half_width += width[r][k];
        }
        row.coverage /= static_cast<double>(config.reps);
        row.mean_half_width /= static_cast<double>(config.reps);
        rows.push_back(row);
      }
    }
  };

  for (const auto& j0 : config.j0s) {
    for (const std::size_t n : config.ns) {
      if (config.flir) {
        flir::SyntheticConfig sc;
        sc.j0 = j0;
        const flir::SyntheticDgp dgp(sc, phi);
        const GridFunction target = dgp.best_approximation();
        const double alpha = config.flir_alpha.at(n);
        std::vector<std::vector<char>> covered(config.reps, std::vector<char>(combos));
        std::vector<std::vector<double>> width(config.reps, std::vector<double>(combos));
        parallel_for(config.reps, config.threads, [&](std::size_t r) {
          const std::uint64_t seed = replication_seed(config.seed, r);
          const flir::FlirSample s = dgp.sample(n, seed);
          const GridFunction fit = flir::flir_fit(s, FilterSpec::tikhonov(alpha));
          const inference::SimulationSettings sim{config.sim_draws, seed + kBandSeedOffset};
          for (std::size_t g = 0; g < config.gammas.size(); ++g) {
            for (std::size_t c = 0; c < config.c_consts.size(); ++c) {
              const std::size_t k = g * config.c_consts.size() + c;
              const auto band = inference::flir_confband(s, fit, alpha, config.gammas[g], config.c_consts[c], sim);
              covered[r][k] = band.covers(target);
              width[r][k] = band.half_width;
            }
          }
        });
        collect("flir", j0, n, alpha, covered, width);
      }
      if (config.npiv) {
        const dgp::DgpConfig dc = design(j0, config.k_max);
        (void)dgp::build_nid_density(dc, grid);
        const dgp::NidDensity density(dc);
        const GridFunction target = dgp::best_approx(dc, grid);
        const double alpha = config.npiv_alpha.at(n);
        std::vector<std::vector<char>> covered(config.reps, std::vector<char>(combos));
        std::vector<std::vector<double>> width(config.reps, std::vector<double>(combos));
        parallel_for(config.reps, config.threads, [&](std::size_t r) {
          const std::uint64_t seed = replication_seed(config.seed, r);
          const npiv::NpivSample s = dgp::sample(density, n, seed);
          const GridFunction fit = npiv::npiv_fit(s, config.kspec, FilterSpec::tikhonov(alpha), grid);
          const inference::SimulationSettings sim{config.sim_draws, seed + kBandSeedOffset};
          for (std::size_t g = 0; g < config.gammas.size(); ++g) {
            for (std::size_t c = 0; c < config.c_consts.size(); ++c) {
              const std::size_t k = g * config.c_consts.size() + c;
              const auto band =
                  inference::npiv_confband(s, fit, config.kspec, alpha, config.gammas[g], config.c_consts[c], sim);
              covered[r][k] = band.covers(target);
              width[r][k] = band.half_width;
            }
          }
        });
        collect("npiv", j0, n, alpha, covered, width);
      }
    }
  }
  return rows;
}

void LimitRunConfig::validate() const {
  check_ns(ns);
  require(seeds >= 1, ErrorKind::config, "seeds must be positive");
  require(!mu0_scales.empty(), ErrorKind::config, "mu0_scales is empty");
  require(mu0_index >= 1, ErrorKind::config, "mu0_index must be positive");
  require(base.reps >= 1, ErrorKind::config, "reps must be positive");
  require(base.alpha_scale > 0.0, ErrorKind::config, "alpha_scale must be positive");
  require(base.mixture_sample >= 10 && base.mixture_draws >= 100, ErrorKind::config,
          "mixture sample and draw counts are too small");
  require(base.energy > 0.0 && base.energy <= 1.0, ErrorKind::config, "energy must lie in (0,1]");
  require(base.grid_size >= 4, ErrorKind::config, "grid_size must be at least 4");
  base.kspec.validate();
}

std::uint64_t limit_seed(std::uint64_t base, std::size_t k) noexcept { return base + kLimitSeedStride * k; }

std::vector<LimitRow> run_limit_check(const LimitRunConfig& config) {
  config.validate();
  const Grid grid = Grid::midpoint(config.base.grid_size);
  const GridFunction mu = trig_basis(config.mu0_index, grid);
  std::vector<LimitRow> rows;
  for (const std::size_t n : config.ns) {
    for (std::size_t k = 0; k < config.seeds; ++k) {
      for (const double scale : config.mu0_scales) {
        inference::LimitCheckConfig c = config.base;
        c.n = n;
        c.seed = limit_seed(config.base.seed, k);
        const auto rep = inference::degenerate_limit_check(c, scale * mu);
        LimitRow row;
        row.n = n;
        row.seed = c.seed;
        row.mu0_scale = scale;
        row.alpha = rep.alpha;
        row.reps = c.reps;
        row.ks = rep.ks;
        row.eigen_retained = rep.eigen_retained;
        row.offset = rep.mixture.offset();
        row.mixture_variance = rep.mixture.variance();
        row.stat_mean = stats::mean(rep.statistics);
        row.stat_variance = rep.statistics.size() >= 2 ? stats::variance(rep.statistics) : 0.0;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void BoundConfig::validate() const {
  require(!j0 || *j0 >= 1, ErrorKind::config, "j0 must be a positive integer or inf");
  require(n >= 2 && reps >= 1, ErrorKind::config, "n and reps must be positive");
  require(beta >= 0.0, ErrorKind::config, "beta must be nonnegative");
  require(alpha_min > 0.0 && alpha_max > alpha_min, ErrorKind::config, "alpha grid needs 0 < alpha_min < alpha_max");
  require(alpha_points >= 3, ErrorKind::config, "alpha grid needs at least 3 points");
  check_design({j0}, k_max, grid_size);
  kspec.validate();
}

BoundRow bound_terms(double alpha, double beta, double c_delta, double c_rho1, double c_rho2, double c_f) {
  const double b2 = std::min(beta, 2.0);
  const double b1 = std::min(beta, 1.0);
  BoundRow row;
  row.alpha = alpha;
  row.variance = c_delta / (4.0 * alpha);
  row.nonidentified = c_rho1 / (4.0 * alpha);
  row.operator_term = c_rho2 * c_f * c_f / alpha * (0.25 * std::pow(alpha, b2) + std::pow(alpha, b1));
  row.bias = c_f * c_f * std::pow(alpha, b2);
  row.bound = row.variance + row.nonidentified + row.operator_term + row.bias;
  return row;
}

BoundReport eval_bound(const BoundConfig& config) {
  config.validate();
  const Grid grid = Grid::midpoint(config.grid_size);
  const dgp::DgpConfig dc = design(config.j0, config.k_max);
  const DiscreteOperator k_pop = npiv::build_operator(dgp::build_nid_density(dc, grid));
  const dgp::NidDensity density(dc);
  const GridFunction phi = GridFunction::sample(grid, dgp::true_phi);
  const GridFunction phi1 = dgp::best_approx(dc, grid);
  const GridFunction phi0 = phi - phi1;

  BoundReport report;
  report.beta = config.beta;
  const SvdCache pop = svd(k_pop);
  double cf2 = 0.0;
  for (std::size_t j = 0; j < pop.numerical_rank(); ++j) {
    const double c = inner(phi1, pop.right_function(j)) / std::pow(pop.effective_value(j), config.beta);
    cf2 += c * c;
  }
  report.c_f = std::sqrt(cf2);

  std::vector<double> alphas(config.alpha_points);
  const double la = std::log(config.alpha_min), lb = std::log(config.alpha_max);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    alphas[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(alphas.size() - 1));
  }

  const std::size_t reps = config.reps;
  std::vector<double> delta(reps), rho1(reps), rho2(reps);
  Eigen::MatrixXd risk(static_cast<Eigen::Index>(reps), static_cast<Eigen::Index>(alphas.size()));
  parallel_for(reps, config.threads, [&](std::size_t r) {
    const npiv::NpivSample s = dgp::sample(density, config.n, replication_seed(config.seed, r));
    const DiscreteOperator k_hat = npiv::build_operator(npiv::kde_joint(s, config.kspec, grid));
    const GridFunction r_hat = npiv::estimate_r(s, config.kspec, grid);
    const GridFunction resid = r_hat - apply(k_hat, phi);
    delta[r] = inner(resid, resid);
    rho1[r] = l2_norm(apply(k_hat, phi0));
    const double d = operator_norm(k_hat - k_pop);
    rho2[r] = d * d;
    const SvdCache sv = svd(k_hat);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const GridFunction err = regularize(sv, r_hat, FilterSpec::tikhonov(alphas[i])) - phi1;
      risk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = inner(err, err);
    }
  });
  report.c_delta = stats::mean(delta);
  report.c_rho1 = stats::mean(rho1);
  report.c_rho2 = stats::mean(rho2);

  const Eigen::VectorXd emp = risk.colwise().mean().transpose();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    BoundRow row = bound_terms(alphas[i], config.beta, report.c_delta, report.c_rho1, report.c_rho2, report.c_f);
    row.empirical_risk = emp[static_cast<Eigen::Index>(i)];
    report.rows.push_back(row);
  }
  report.bias_nondecreasing = true;
  report.variance_nonincreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    report.bias_nondecreasing = report.bias_nondecreasing && report.rows[i].bias >= report.rows[i - 1].bias;
    report.variance_nonincreasing =
        report.variance_nonincreasing && report.rows[i].variance <= report.rows[i - 1].variance;
  }
  auto argmin = [&](auto key) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      if (key(report.rows[i]) < key(report.rows[best])) best = i;
    }
    return best;
  };
  const std::size_t ib = argmin([](const BoundRow& r) { return r.bound; });
  const std::size_t ie = argmin([](const BoundRow& r) { return r.empirical_risk; });
  report.alpha_bound_min = report.rows[ib].alpha;
  report.alpha_empirical_min = report.rows[ie].alpha;
  report.interior_empirical_minimum = ie > 0 && ie + 1 < report.rows.size();
  return report;
}

void FiltersConfig::validate() const {
  require(!alphas.empty(), ErrorKind::config, "alpha list is empty");
  require(points >= 2, ErrorKind::config, "points must be at least 2");
  require(lambda_max > 0.0, ErrorKind::config, "lambda_max must be positive");
  for (double a : alphas) {
    FilterSpec::tikhonov(a).validate();
    FilterSpec::iterated_tikhonov(iterations, a).validate();
    FilterSpec::landweber(step, a).validate();
  }
}

std::vector<FilterRow> run_filters(const FiltersConfig& config) {
  config.validate();
  std::vector<FilterRow> rows;
  for (const Scheme scheme :
       {Scheme::tikhonov, Scheme::spectral_cutoff, Scheme::iterated_tikhonov, Scheme::landweber}) {
    const SchemeSpec ss{scheme, config.iterations, config.step};
    for (const double a : config.alphas) {
      const FilterSpec spec = ss.with_alpha(a);
      for (std::size_t i = 0; i < config.points; ++i) {
        const double lambda =
            config.lambda_max * static_cast<double>(i) / static_cast<double>(config.points - 1);
        rows.push_back(FilterRow{scheme, a, lambda, filter_value(spec, lambda)});
      }
    }
  }
  return rows;
}

}  // namespace nidreg::bench
