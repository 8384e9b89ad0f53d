#include "hfa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hfa/errors.hpp"

namespace hfa::stats {
namespace {

std::vector<double> ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double average = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = average;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit abscissa and ordinate differ in length");
  if (x.size() < 2) throw InvalidArgument("linear fit needs at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("linear fit needs two distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points = x.size();
  return fit;
}

ProportionalFit proportional_fit(std::span<const double> feature, std::span<const double> y) {
  if (feature.size() != y.size() || y.empty()) {
    throw DimensionMismatch("proportional fit needs matching non-empty samples");
  }
  double ff = 0.0, fy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ff += feature[i] * feature[i];
    fy += feature[i] * y[i];
  }
  ProportionalFit fit;
  fit.coefficient = ff > 0.0 ? fy / ff : 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - fit.coefficient * feature[i];
    fit.residual_sum_of_squares += r * r;
  }
  const double n = static_cast<double>(y.size());
  // Gaussian-likelihood AIC with one fitted coefficient.
  fit.aic = fit.residual_sum_of_squares > 0.0
                ? n * std::log(fit.residual_sum_of_squares / n) + 2.0
                : -std::numeric_limits<double>::infinity();
  return fit;
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size() - 1));
}

double standard_error(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  return sample_stddev(values) / std::sqrt(static_cast<double>(values.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("spearman samples differ in length");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

double spearman_p_value(std::span<const double> x, std::span<const double> y, bool negative) {
  const double observed = spearman(x, y);
  const std::size_t n = x.size();
  if (n < 3) return 1.0;
  if (n <= 9) {
    const auto rx = ranks(x);
    std::vector<double> ry = ranks(y);
    std::sort(ry.begin(), ry.end());
    std::size_t extreme = 0, total = 0;
    const double slack = 1e-12;
    do {
      const double rho = pearson(rx, ry);
      if (negative ? rho <= observed + slack : rho >= observed - slack) ++extreme;
      ++total;
    } while (std::next_permutation(ry.begin(), ry.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
  }
  const double z = observed * std::sqrt(static_cast<double>(n - 1));
  return 0.5 * std::erfc((negative ? -z : z) / std::sqrt(2.0));
}

}  // namespace hfa::stats
