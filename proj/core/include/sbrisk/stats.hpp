#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbrisk {

/// Pairwise (cascade) summation; the result depends only on element order.
[[nodiscard]] double pairwise_sum(std::span<const double> values);

[[nodiscard]] double mean(std::span<const double> values);

/// Sample mean and its standard error sd / sqrt(n) (0 when n < 2).
struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
[[nodiscard]] MeanEstimate mean_with_stderr(std::span<const double> values);

/// Type-7 (linear interpolation) empirical quantile, q in [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double q);
[[nodiscard]] double median(std::vector<double> values);

/// Wilson score interval for a binomial proportion.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};
[[nodiscard]] Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double x);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
[[nodiscard]] LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace sbrisk
