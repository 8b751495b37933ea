#include "ouedge/edgeworth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ouedge/errors.hpp"
#include "ouedge/quadrature.hpp"

namespace ouedge {

namespace {

constexpr double kTruncationWidth = 40.0;

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// E[Y^m] for Y ~ N(0, sigma).
double gaussian_moment(int m, double sigma) {
  if (m % 2 == 1) return 0.0;
  double out = 1.0;
  for (int i = m - 1; i > 0; i -= 2) out *= i;
  return out * std::pow(sigma, m / 2);
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("Sigma must be positive");
}

}  // namespace

ExpansionCoefficients::ExpansionCoefficients(int order, double sigma, std::vector<HermiteTerm> terms)
    : order_(order), sigma_(sigma), terms_(std::move(terms)) {
  if (order < 2) throw DomainError("expansion order must be at least 2");
  require_sigma(sigma);
  for (const auto& t : terms_) {
    if (!std::isfinite(t.coeff)) throw DomainError("non-finite expansion coefficient");
    if (t.degree < 1) throw DomainError("Hermite term degree must be positive");
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const HermiteTerm& l, const HermiteTerm& r) { return l.degree < r.degree; });
}

double hermite(int r, double y, double sigma) {
  require_sigma(sigma);
  if (r < 0) throw DomainError("hermite: degree must be nonnegative");
  if (r == 0) return 1.0;
  double prev = 1.0;
  double cur = y / sigma;
  for (int k = 1; k < r; ++k) {
    const double next = (y * cur - k * prev) / sigma;
    prev = cur;
    cur = next;
  }
  return cur;
}

double normal_pdf(double y, double sigma) {
  require_sigma(sigma);
  return std::exp(-0.5 * y * y / sigma) / std::sqrt(2.0 * std::numbers::pi * sigma);
}

double normal_cdf(double y, double sigma) {
  require_sigma(sigma);
  return 0.5 * std::erfc(-y / std::sqrt(2.0 * sigma));
}

std::vector<std::vector<int>> compositions(int k) {
  if (k < 1 || k > 30) throw DomainError("compositions: k must be in 1..30");
  // Ordered compositions of k correspond to subsets of the k-1 cut points.
  const unsigned n_masks = 1u << (k - 1);
  std::vector<std::vector<int>> out;
  out.reserve(n_masks);
  for (unsigned mask = 0; mask < n_masks; ++mask) {
    std::vector<int> parts;
    int part = 1;
    for (int pos = 1; pos <= k; ++pos) {
      if (pos < k && !((mask >> (pos - 1)) & 1u)) {
        ++part;
        continue;
      }
      parts.push_back(part);
      part = 1;
    }
    out.push_back(std::move(parts));
  }
  return out;
}

ExpansionCoefficients expansion_coefficients(int p, const ChiTable& table) {
  if (p < 2) throw DomainError("expansion_coefficients: p must be at least 2");
  if (p > kMaxOrder) throw DomainError("expansion_coefficients: p exceeds " + std::to_string(kMaxOrder));
  if (table.max_order() < p) throw DomainError("expansion_coefficients: chi table too short");

  std::map<int, double> by_degree;
  for (int k = 1; k <= p - 2; ++k) {
    for (const auto& parts : compositions(k)) {
      double num = 1.0;
      for (int part : parts) num *= table.chi(part + 2) / factorial(part + 2);
      const int l = static_cast<int>(parts.size());
      by_degree[k + 2 * l] += num / factorial(l);
    }
  }
  std::vector<HermiteTerm> terms;
  terms.reserve(by_degree.size());
  for (const auto& [degree, coeff] : by_degree) terms.push_back({degree, coeff});
  return ExpansionCoefficients(p, table.sigma(), std::move(terms));
}

double density(double y, const ExpansionCoefficients& ec) {
  double bracket = 1.0;
  for (const auto& t : ec.terms()) bracket += t.coeff * hermite(t.degree, y, ec.sigma());
  return bracket * normal_pdf(y, ec.sigma());
}

double psi_indicator(double a, const ExpansionCoefficients& ec) {
  // int_{-inf}^{a} h_k phi = -h_{k-1}(a) phi(a) for k >= 1
  double correction = 0.0;
  for (const auto& t : ec.terms()) correction += t.coeff * hermite(t.degree - 1, a, ec.sigma());
  return normal_cdf(a, ec.sigma()) - correction * normal_pdf(a, ec.sigma());
}

double psi_upper(double a, const ExpansionCoefficients& ec) {
  double correction = 0.0;
  for (const auto& t : ec.terms()) correction += t.coeff * hermite(t.degree - 1, a, ec.sigma());
  return normal_cdf(-a, ec.sigma()) + correction * normal_pdf(a, ec.sigma());
}

namespace {

double interpolate(const Tabulated& tab, double y) {
  if (y <= tab.x.front()) return tab.y.front();
  if (y >= tab.x.back()) return tab.y.back();
  const auto it = std::upper_bound(tab.x.begin(), tab.x.end(), y);
  const auto hi = static_cast<std::size_t>(it - tab.x.begin());
  const std::size_t lo = hi - 1;
  const double w = (y - tab.x[lo]) / (tab.x[hi] - tab.x[lo]);
  return tab.y[lo] + w * (tab.y[hi] - tab.y[lo]);
}

void validate_table(const Tabulated& tab) {
  if (tab.x.empty() || tab.x.size() != tab.y.size())
    throw DomainError("tabulated function needs matching, nonempty x and y");
  for (std::size_t i = 1; i < tab.x.size(); ++i)
    if (!(tab.x[i] > tab.x[i - 1])) throw DomainError("tabulated x grid must be strictly increasing");
}

double polynomial_expect(const Polynomial& poly, const ExpansionCoefficients& ec) {
  const double sigma = ec.sigma();
  double total = 0.0;
  for (std::size_t n = 0; n < poly.coeffs.size(); ++n) {
    const int deg = static_cast<int>(n);
    // int y^n h_k phi = n!/(n-k)! E[Y^{n-k}] (k-fold integration by parts)
    double moment = gaussian_moment(deg, sigma);
    for (const auto& t : ec.terms()) {
      if (t.degree > deg) continue;
      moment += t.coeff * factorial(deg) / factorial(deg - t.degree) *
                gaussian_moment(deg - t.degree, sigma);
    }
    total += poly.coeffs[n] * moment;
  }
  return total;
}

double tabulated_expect(const Tabulated& tab, const ExpansionCoefficients& ec) {
  const double half = kTruncationWidth * std::sqrt(ec.sigma());
  std::vector<double> breaks{-half};
  for (double x : tab.x)
    if (x > -half && x < half) breaks.push_back(x);
  breaks.push_back(half);
  auto integrand = [&](double y) { return interpolate(tab, y) * density(y, ec); };
  double total = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i)
    total += integrate(integrand, breaks[i - 1], breaks[i], 1e-14, 1e-12).value;
  return total;
}

}  // namespace

double evaluate(const TestFunction& f, double y) {
  struct Visitor {
    double y;
    double operator()(const IndicatorLE& g) const { return y <= g.a ? 1.0 : 0.0; }
    double operator()(const IndicatorInterval& g) const { return (y > g.a && y <= g.b) ? 1.0 : 0.0; }
    double operator()(const Polynomial& g) const {
      double acc = 0.0;
      for (auto it = g.coeffs.rbegin(); it != g.coeffs.rend(); ++it) acc = acc * y + *it;
      return acc;
    }
    double operator()(const Tabulated& g) const {
      validate_table(g);
      return interpolate(g, y);
    }
  };
  return std::visit(Visitor{y}, f);
}

double psi_expect(const TestFunction& f, const ExpansionCoefficients& ec) {
  struct Visitor {
    const ExpansionCoefficients& ec;
    double operator()(const IndicatorLE& g) const { return psi_indicator(g.a, ec); }
    double operator()(const IndicatorInterval& g) const {
      if (!(g.b >= g.a)) throw DomainError("interval test function needs a <= b");
      return psi_indicator(g.b, ec) - psi_indicator(g.a, ec);
    }
    double operator()(const Polynomial& g) const {
      int degree = static_cast<int>(g.coeffs.size()) - 1;
      while (degree > 0 && g.coeffs[static_cast<std::size_t>(degree)] == 0.0) --degree;
      if (degree > ec.growth_bound())
        throw DomainError("polynomial degree " + std::to_string(degree) +
                          " exceeds growth bound p0 = " + std::to_string(ec.growth_bound()));
      return polynomial_expect(g, ec);
    }
    double operator()(const Tabulated& g) const {
      validate_table(g);
      return tabulated_expect(g, ec);
    }
  };
  return std::visit(Visitor{ec}, f);
}

NegativeDensityReport negative_density_report(const ExpansionCoefficients& ec, double width, int n) {
  if (n < 2) throw DomainError("negative_density_report: need at least two grid points");
  const double half = width * std::sqrt(ec.sigma());
  NegativeDensityReport report;
  report.min_value = density(-half, ec);
  report.location = -half;
  for (int i = 1; i < n; ++i) {
    const double y = -half + 2.0 * half * i / (n - 1);
    const double g = density(y, ec);
    if (g < report.min_value) {
      report.min_value = g;
      report.location = y;
    }
  }
  report.negative = report.min_value < 0.0;
  return report;
}

SeriesOracleResult charfn_series_oracle(int p, const ChiTable& table, double u) {
  const double sigma = table.sigma();
  require_sigma(sigma);
  if (std::abs(u) > 50.0 / std::sqrt(sigma)) throw DomainError("charfn_series_oracle: |u| too large");
  using cplx = std::complex<double>;
  const cplx iu(0.0, u);
  const double gauss = std::exp(-0.5 * sigma * u * u);

  const auto ec = expansion_coefficients(p, table);
  cplx bracket = 1.0;
  for (const auto& t : ec.terms()) bracket += t.coeff * std::pow(iu, t.degree);
  const cplx value = gauss * bracket;

  // a_n multiplies eps^n, eps = T^{-1/2}: chi_{n+2} (iu)^{n+2} / (n+2)!.
  const int order = p - 2;
  std::vector<cplx> a(static_cast<std::size_t>(order) + 1, 0.0);
  for (int n = 1; n <= order; ++n)
    a[static_cast<std::size_t>(n)] = table.chi(n + 2) * std::pow(iu, n + 2) / factorial(n + 2);
  // exp of a power series without constant term: b_n = (1/n) sum_k k a_k b_{n-k}
  std::vector<cplx> b(static_cast<std::size_t>(order) + 1, 0.0);
  b[0] = 1.0;
  for (int n = 1; n <= order; ++n) {
    cplx acc = 0.0;
    for (int k = 1; k <= n; ++k)
      acc += static_cast<double>(k) * a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(n - k)];
    b[static_cast<std::size_t>(n)] = acc / static_cast<double>(n);
  }
  cplx series = 0.0;
  for (const auto& bn : b) series += bn;
  series *= gauss;
  return {value, std::abs(value - series)};
}

}  // namespace ouedge
