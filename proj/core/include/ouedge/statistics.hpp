#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ouedge {

struct ProportionEstimate {
  double estimate = 0.0;
  double se = 0.0;  // sqrt(p (1 - p) / n)
};

// Empirical P(X <= a). Throws DomainError for fewer than two samples.
ProportionEstimate estimate_indicator(std::span<const double> samples, double a);

// Unbiased k-statistics k_1..k_{r_max} (r_max <= 4); needs n >= max(r_max, 2).
std::vector<double> k_statistics_point(std::span<const double> samples, int r_max);

struct KStatistics {
  std::vector<double> values;  // k_1..k_{r_max}
  std::vector<double> se;      // bootstrap standard errors
};

// k-statistics with nonparametric bootstrap SEs. Resample b draws from
// RngStream(seed, b), so the result does not depend on `workers`.
KStatistics k_statistics(std::span<const double> samples, int r_max, int n_boot = 200,
                         std::uint64_t seed = 0x5eed, unsigned workers = 1);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);  // unbiased

struct KsResult {
  double statistic = 0.0;  // sup-distance D
  double p_value = 1.0;
};

// Kolmogorov limiting survival function Q(x) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 x^2}.
double kolmogorov_survival(double x);

// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

// Two-sample test.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace ouedge
