#pragma once

#include <span>
#include <vector>

namespace hfa::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least squares y = c * f with a single coefficient and no intercept.
struct ProportionalFit {
  double coefficient = 0.0;
  double residual_sum_of_squares = 0.0;
  double aic = 0.0;
};
ProportionalFit proportional_fit(std::span<const double> feature, std::span<const double> y);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> values);
/// Standard error of the mean.
double standard_error(std::span<const double> values);
double median(std::vector<double> values);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// One-sided p-value of Spearman's rho against H0 of no association, for the
/// alternative rho < 0 (`negative` true) or rho > 0. Exact permutation
/// distribution for n <= 9, normal approximation beyond.
double spearman_p_value(std::span<const double> x, std::span<const double> y, bool negative);

}  // namespace hfa::stats
