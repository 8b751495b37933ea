#include "ouedge/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "ouedge/errors.hpp"
#include "ouedge/parallel.hpp"
#include "ouedge/rng.hpp"

namespace ouedge {

namespace {

__extension__ using uint128 = unsigned __int128;

// Power sums of (x - shift), r = 1..4.
struct PowerSums {
  double n = 0.0;
  double s[5] = {0.0, 0.0, 0.0, 0.0, 0.0};

  void add(double d) {
    const double d2 = d * d;
    n += 1.0;
    s[1] += d;
    s[2] += d2;
    s[3] += d2 * d;
    s[4] += d2 * d2;
  }
};

// k-statistics from power sums about an arbitrary shift.
std::vector<double> kstats_from_sums(const PowerSums& ps, double shift, int r_max) {
  const double n = ps.n;
  const double mu = ps.s[1] / n;  // mean of the shifted data
  const double r2 = ps.s[2] / n, r3 = ps.s[3] / n, r4 = ps.s[4] / n;
  // central moments m_r from raw moments about the shift
  const double m2 = std::max(0.0, r2 - mu * mu);
  const double m3 = r3 - 3.0 * mu * r2 + 2.0 * mu * mu * mu;
  const double m4 = r4 - 4.0 * mu * r3 + 6.0 * mu * mu * r2 - 3.0 * mu * mu * mu * mu;

  std::vector<double> k(static_cast<std::size_t>(r_max));
  k[0] = mu + shift;
  if (r_max >= 2) k[1] = n * m2 / (n - 1.0);
  if (r_max >= 3) k[2] = n * n * m3 / ((n - 1.0) * (n - 2.0));
  if (r_max >= 4)
    k[3] = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
  return k;
}

void require_kstat_input(std::span<const double> samples, int r_max) {
  if (r_max < 1 || r_max > 4) throw DomainError("k_statistics: r_max must be in 1..4");
  // k_r has (n-1)...(n-r+1) in its denominator
  if (samples.size() < static_cast<std::size_t>(std::max(r_max, 2)))
    throw DomainError("k_statistics: need at least max(r_max, 2) samples");
}

}  // namespace

ProportionEstimate estimate_indicator(std::span<const double> samples, double a) {
  if (samples.size() < 2) throw DomainError("estimate_indicator: need at least two samples");
  const auto hits = std::count_if(samples.begin(), samples.end(), [a](double x) { return x <= a; });
  const double n = static_cast<double>(samples.size());
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("sample_mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("sample_variance: need at least two samples");
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

std::vector<double> k_statistics_point(std::span<const double> samples, int r_max) {
  require_kstat_input(samples, r_max);
  const double shift = sample_mean(samples);
  PowerSums ps;
  for (double x : samples) ps.add(x - shift);
  auto k = kstats_from_sums(ps, shift, r_max);
  // exact mean; the shifted sum only carries rounding
  k[0] = shift;
  return k;
}

KStatistics k_statistics(std::span<const double> samples, int r_max, int n_boot, std::uint64_t seed,
                         unsigned workers) {
  require_kstat_input(samples, r_max);
  if (n_boot < 2) throw DomainError("k_statistics: need at least two bootstrap resamples");
  KStatistics out;
  out.values = k_statistics_point(samples, r_max);
  const double shift = out.values[0];
  const std::uint64_t n = samples.size();

  std::vector<std::vector<double>> boot(static_cast<std::size_t>(n_boot));
  parallel_for(boot.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      RngStream rng(seed, b);
      PowerSums ps;
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>((static_cast<uint128>(rng()) * n) >> 64);
        ps.add(samples[idx] - shift);
      }
      boot[b] = kstats_from_sums(ps, shift, r_max);
    }
  });

  out.se.assign(static_cast<std::size_t>(r_max), 0.0);
  for (int r = 0; r < r_max; ++r) {
    std::vector<double> col;
    col.reserve(boot.size());
    for (const auto& kb : boot) col.push_back(kb[static_cast<std::size_t>(r)]);
    out.se[static_cast<std::size_t>(r)] = std::sqrt(sample_variance(col));
  }
  return out;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // Q(0.2) = 1 - 3e-22
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-17 * sum) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double sq = std::sqrt(n_eff);
  return kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("ols_slope: need matching samples of size >= 2");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace ouedge
