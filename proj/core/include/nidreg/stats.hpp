#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nidreg::stats {

[[nodiscard]] double mean(std::span<const double> x);
/// Sample variance with the n-1 denominator.
[[nodiscard]] double variance(std::span<const double> x);
[[nodiscard]] double median(std::vector<double> x);
/// Linear-interpolation quantile (R type 7), p in [0, 1].
[[nodiscard]] double quantile(std::vector<double> x, double p);

[[nodiscard]] double normal_cdf(double x) noexcept;
[[nodiscard]] double normal_quantile(double p);

/// sup_x |F_n(x) - F(x)| for a continuous reference cdf.
[[nodiscard]] double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
/// sup_x |F_n(x) - G_m(x)| between two empirical distributions.
[[nodiscard]] double ks_two_sample(std::vector<double> x, std::vector<double> y);

/// Least-squares slope of y on x.
[[nodiscard]] double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace nidreg::stats
