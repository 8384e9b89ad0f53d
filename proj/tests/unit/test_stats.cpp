#include <doctest.h>

#include <cmath>
#include <vector>

#include "hfa/stats.hpp"

using namespace hfa;

// Reference values computed with scipy.stats (spearmanr, linregress) and by
// enumerating all permutations.

TEST_SUITE("stats") {
  TEST_CASE("least squares line") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{1.0, 2.9, 5.2, 7.1, 8.8};
    const auto fit = stats::linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(1.98).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(1.04).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(0.997557251908397).epsilon(1e-12));
    CHECK(fit.points == 5);
  }

  TEST_CASE("exact line has unit R squared") {
    const std::vector<double> x{1, 2, 3};
    const std::vector<double> y{5, 3, 1};
    const auto fit = stats::linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(-2.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
  }

  TEST_CASE("proportional fit and its AIC") {
    const std::vector<double> f{1, 2, 3, 4};
    const std::vector<double> y{2.1, 3.9, 6.2, 7.8};
    const auto fit = stats::proportional_fit(f, y);
    double fy = 0, ff = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      fy += f[i] * y[i];
      ff += f[i] * f[i];
    }
    const double c = fy / ff;
    double rss = 0;
    for (std::size_t i = 0; i < f.size(); ++i) rss += (y[i] - c * f[i]) * (y[i] - c * f[i]);
    CHECK(fit.coefficient == doctest::Approx(c).epsilon(1e-14));
    CHECK(fit.residual_sum_of_squares == doctest::Approx(rss).epsilon(1e-12));
    CHECK(fit.aic == doctest::Approx(4.0 * std::log(rss / 4.0) + 2.0).epsilon(1e-12));

    const std::vector<double> exact{2, 4, 6, 8};
    const auto perfect = stats::proportional_fit(f, exact);
    CHECK(perfect.residual_sum_of_squares == 0.0);
    CHECK(std::isinf(perfect.aic));
    CHECK(perfect.aic < 0.0);
  }

  TEST_CASE("moments") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(stats::mean(v) == doctest::Approx(5.0));
    CHECK(stats::sample_stddev(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK(stats::standard_error(v) == doctest::Approx(std::sqrt(32.0 / 7.0) / std::sqrt(8.0)));
    CHECK(stats::median(v) == doctest::Approx(4.5));
    CHECK(stats::median({3, 1, 2}) == 2.0);
  }

  TEST_CASE("spearman without ties") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> y{2, 1, 4, 3, 7, 5, 6};
    CHECK(stats::spearman(x, y) == doctest::Approx(0.8214285714285715).epsilon(1e-14));
    CHECK(stats::spearman_p_value(x, y, false) ==
          doctest::Approx(86.0 / 5040.0).epsilon(1e-12));
  }

  TEST_CASE("spearman with ties uses average ranks") {
    const std::vector<double> x{1, 2, 2, 3, 4};
    const std::vector<double> y{1, 3, 2, 2, 5};
    CHECK(stats::spearman(x, y) == doctest::Approx(0.7631578947368421).epsilon(1e-14));
  }

  TEST_CASE("perfect negative order of five points") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{11.6, 4.56, 2.39, 1.60, 1.23};
    CHECK(stats::spearman(x, y) == doctest::Approx(-1.0));
    CHECK(stats::spearman_p_value(x, y, true) == doctest::Approx(1.0 / 120.0).epsilon(1e-12));
    CHECK(stats::spearman_p_value(x, y, false) == doctest::Approx(1.0));
  }

  TEST_CASE("normal approximation beyond nine points") {
    std::vector<double> x(12);
    for (int i = 0; i < 12; ++i) x[i] = i;
    const std::vector<double> y{3, 1, 2, 5, 4, 6, 8, 7, 10, 9, 12, 11};
    CHECK(stats::spearman(x, y) == doctest::Approx(0.9510489510489512).epsilon(1e-14));
    CHECK(stats::spearman_p_value(x, y, false) ==
          doctest::Approx(0.0008044937798249595).epsilon(1e-9));
  }

  TEST_CASE("degenerate inputs") {
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS(stats::linear_fit(one, one));
    CHECK_THROWS(stats::linear_fit(two, one));
    CHECK(stats::sample_stddev(one) == 0.0);
    CHECK(stats::standard_error(one) == 0.0);
    CHECK(std::isnan(stats::median({})));
    CHECK(std::isnan(stats::mean(std::vector<double>{})));
  }
}
