#pragma once

// Edgeworth expansion of order p - 2 for a scalar statistic whose cumulants
// chi_{2..p} are known. The expansion density is
//
//   g_p(y) = { 1 + sum_terms coeff * h_degree(y; Sigma) } phi(y; Sigma),
//
// where the terms come from all ordered compositions (k_1..k_l) of
// k = 1..p-2, degree = k + 2l and
//   coeff = prod chi_{k_i+2} / (l! prod (k_i+2)!).
// Psi_p is a signed measure; g_p may dip below zero in the tails.

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "ouedge/cumulants.hpp"

namespace ouedge {

struct HermiteTerm {
  int degree = 0;
  double coeff = 0.0;

  friend bool operator==(const HermiteTerm&, const HermiteTerm&) = default;
};

class ExpansionCoefficients {
 public:
  // Throws DomainError if order < 2, sigma <= 0 or a coefficient is not finite.
  ExpansionCoefficients(int order, double sigma, std::vector<HermiteTerm> terms);

  int order() const noexcept { return order_; }
  double sigma() const noexcept { return sigma_; }
  std::span<const HermiteTerm> terms() const noexcept { return terms_; }
  // Growth exponent p0 = 2 floor(p/2) of the admissible test-function class.
  int growth_bound() const noexcept { return 2 * (order_ / 2); }

 private:
  int order_;
  double sigma_;
  std::vector<HermiteTerm> terms_;  // ascending degree
};

// h_r(y; Sigma) = (-1)^r phi^{-1} d^r/dy^r phi via
// h_{r+1} = (y h_r - r h_{r-1}) / Sigma.
double hermite(int r, double y, double sigma);

// Centered normal density and distribution function with variance sigma.
double normal_pdf(double y, double sigma);
double normal_cdf(double y, double sigma);

// All ordered compositions of k (tuples of positive integers summing to k), 2^{k-1} of them.
std::vector<std::vector<int>> compositions(int k);

ExpansionCoefficients expansion_coefficients(int p, const ChiTable& table);

double density(double y, const ExpansionCoefficients& ec);

// Psi_p[1_{(-inf, a]}] and Psi_p[1_{(a, inf)}].
double psi_indicator(double a, const ExpansionCoefficients& ec);
double psi_upper(double a, const ExpansionCoefficients& ec);

struct IndicatorLE {
  double a;
};
struct IndicatorInterval {
  double a, b;  // 1_{(a, b]}
};
struct Polynomial {
  std::vector<double> coeffs;  // coeffs[n] multiplies y^n
};
// Piecewise-linear interpolant through (x, y), constant beyond the ends.
struct Tabulated {
  std::vector<double> x;
  std::vector<double> y;
};
using TestFunction = std::variant<IndicatorLE, IndicatorInterval, Polynomial, Tabulated>;

// Evaluate a test function pointwise (used for tabulated quadrature and tests).
double evaluate(const TestFunction& f, double y);

// Psi_p[f] = int f(y) g_p(y) dy. Indicators are closed form, polynomials use
// exact Gaussian moments, tabulated functions are integrated adaptively on
// [-40 sqrt(Sigma), 40 sqrt(Sigma)]. Throws DomainError for a polynomial of
// degree above ec.growth_bound() or a malformed table.
double psi_expect(const TestFunction& f, const ExpansionCoefficients& ec);

struct NegativeDensityReport {
  bool negative = false;
  double min_value = 0.0;
  double location = 0.0;
};

// Scans g_p on a uniform grid of n points over [-width sqrt(Sigma), width sqrt(Sigma)].
NegativeDensityReport negative_density_report(const ExpansionCoefficients& ec,
                                              double width = 10.0, int n = 4001);

struct SeriesOracleResult {
  std::complex<double> value;  // Fourier transform of g_p at u
  double residual = 0.0;       // |value - truncated formal exponential series|
};

// Compares the closed-form transform e^{-Sigma u^2/2}(1 + sum coeff (iu)^degree)
// against exp(sum_{r>=3} chi_r (iu)^r / r!) expanded as a power series in the
// formal parameter T^{-1/2} and truncated at order p - 2.
// Requires |u| <= 50 / sqrt(Sigma).
SeriesOracleResult charfn_series_oracle(int p, const ChiTable& table, double u);

}  // namespace ouedge
