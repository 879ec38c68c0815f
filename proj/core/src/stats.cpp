#include "nidreg/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nidreg/error.hpp"

namespace nidreg::stats {

double mean(std::span<const double> x) {
  require(!x.empty(), ErrorKind::invalid_argument, "mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  require(x.size() >= 2, ErrorKind::invalid_argument, "variance needs two observations");
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size() - 1);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double quantile(std::vector<double> x, double p) {
  require(!x.empty(), ErrorKind::invalid_argument, "quantile of empty sample");
  require(p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument, "quantile level outside [0,1]");
  std::sort(x.begin(), x.end());
  const double h = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorKind::invalid_argument, "normal quantile level outside (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  require(!x.empty(), ErrorKind::invalid_argument, "KS on empty sample");
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  require(!x.empty() && !y.empty(), ErrorKind::invalid_argument, "KS on empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto nx = static_cast<double>(x.size());
  const auto ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_argument, "slope needs paired data");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, ErrorKind::invalid_argument, "slope undefined for constant regressor");
  return sxy / sxx;
}

}  // namespace nidreg::stats
