#include "ouedge/cumulants.hpp"

#include <cmath>
#include <string>

#include "ouedge/errors.hpp"

namespace ouedge {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

}  // namespace

ModelParams::ModelParams(double lam, double gamma, double beta, double rho)
    : lam_(lam), gamma_(gamma), beta_(beta), rho_(rho) {
  require_finite(lam, "lam");
  require_finite(gamma, "gamma");
  require_finite(beta, "beta");
  require_finite(rho, "rho");
  if (!(lam > 0.0)) throw DomainError("lam must be positive");
  if (beta == 0.0) throw DomainError("beta must be nonzero");
  const double scale = std::abs(beta) + std::abs(rho * lam);
  degenerate_ = std::abs(beta + rho * lam) <= kDegeneracyTolerance * scale;
}

CumulantVector::CumulantVector(CumulantKind kind, std::vector<double> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.size() < 2) throw DomainError("cumulant vector needs at least two entries");
  for (double v : values_) require_finite(v, "cumulant");
  if (values_[1] < 0.0) throw DomainError("second cumulant must be nonnegative");
}

double CumulantVector::kappa(int k) const {
  if (k < 1 || static_cast<std::size_t>(k) > values_.size())
    throw DomainError("cumulant order " + std::to_string(k) + " not available");
  return values_[static_cast<std::size_t>(k - 1)];
}

ChiTable::ChiTable(double T, std::vector<double> chis) : T_(T), chis_(std::move(chis)) {
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  if (chis_.empty()) throw DomainError("chi table needs at least chi_2");
}

double ChiTable::chi(int r) const {
  if (r < 2 || r > max_order())
    throw DomainError("chi order " + std::to_string(r) + " not in table");
  return chis_[static_cast<std::size_t>(r - 2)];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

double eta(double lam, double u) {
  if (!(lam > 0.0)) throw DomainError("eta: lam must be positive");
  if (!(u >= 0.0)) throw DomainError("eta: u must be nonnegative");
  if (lam * u > 700.0) return 1.0 / lam;
  return -std::expm1(-lam * u) / lam;
}

double m_coeff(int r, int j, double lam, double T) {
  if (r < 1 || j < 0 || j > r) throw DomainError("m_coeff: index out of range");
  if (!(T > 0.0)) throw DomainError("m_coeff: T must be positive");
  if (j == 0) return 1.0;
  const double x = lam * eta(lam, T);  // in [0, 1)
  // sum_{k=1}^{j} x^k / k, Horner form: x (1 + x (1/2 + x (1/3 + ...)))
  double acc = 1.0 / j;
  for (int k = j - 1; k >= 1; --k) acc = 1.0 / k + x * acc;
  acc *= x;
  const double lam_pow = std::pow(lam, -j);
  return lam_pow - lam_pow * acc / (T * lam);
}

CumulantVector stationary_cumulants(const CumulantVector& driver, double lam) {
  if (driver.kind() != CumulantKind::DriverZ1)
    throw DomainError("stationary_cumulants expects driver (Z_1) cumulants");
  if (!(lam > 0.0)) throw DomainError("stationary_cumulants: lam must be positive");
  std::vector<double> out(driver.max_order());
  for (std::size_t k = 1; k <= out.size(); ++k)
    out[k - 1] = driver.kappa(static_cast<int>(k)) / (static_cast<double>(k) * lam);
  return CumulantVector(CumulantKind::StationaryF, std::move(out));
}

double weight_integral(int r, const ModelParams& params, double T) {
  if (r < 0) throw DomainError("weight_integral: r must be nonnegative");
  if (!(T > 0.0)) throw DomainError("weight_integral: T must be positive");
  const double rho = params.rho();
  const double beta = params.beta();
  double sum = 0.0;
  for (int j = 0; j <= r; ++j) {
    sum += binomial(r, j) * std::pow(rho, r - j) * std::pow(beta, j) *
           m_coeff(r == 0 ? 1 : r, j, params.lam(), T);
  }
  return T * sum;
}

double chi(int r, const ModelParams& params, const CumulantVector& kappaF, double T) {
  if (r < 2) throw DomainError("chi: order must be at least 2");
  if (kappaF.kind() != CumulantKind::StationaryF)
    throw DomainError("chi expects stationary (F) cumulants");
  if (static_cast<std::size_t>(r) > kappaF.max_order())
    throw DomainError("chi: order " + std::to_string(r) + " exceeds available cumulants");
  if (!(T > 0.0)) throw DomainError("chi: T must be positive");

  const double lam = params.lam();
  const double kr = kappaF.kappa(r);
  const double initial = std::pow(params.beta() * eta(lam, T), r) / T;
  double sum = 0.0;
  for (int j = 0; j <= r; ++j) {
    sum += binomial(r, j) * std::pow(params.rho(), r - j) * std::pow(params.beta(), j) *
           m_coeff(r, j, lam, T);
  }
  const double bracket = initial + lam * r * sum;
  return std::pow(T, -0.5 * (r - 2)) * bracket * kr;
}

double chi_limit(int r, const ModelParams& params, const CumulantVector& kappaF) {
  if (r < 2) throw DomainError("chi_limit: order must be at least 2");
  if (static_cast<std::size_t>(r) > kappaF.max_order())
    throw DomainError("chi_limit: order " + std::to_string(r) + " exceeds available cumulants");
  if (params.degenerate()) return 0.0;
  const double lam = params.lam();
  // rho + beta/lam written as (beta + rho lam)/lam so the degenerate case is exactly 0
  const double w = params.effective_loading() / lam;
  return lam * r * std::pow(w, r) * kappaF.kappa(r);
}

ChiTable chi_table(int p, const ModelParams& params, const CumulantVector& kappaF, double T) {
  if (p < 2) throw DomainError("chi_table: order must be at least 2");
  std::vector<double> chis;
  chis.reserve(static_cast<std::size_t>(p - 1));
  for (int r = 2; r <= p; ++r) chis.push_back(chi(r, params, kappaF, T));
  return ChiTable(T, std::move(chis));
}

double wiener_nondegeneracy_det(double C, const ModelParams& params, double t0) {
  if (!(C > 0.0)) throw DomainError("wiener_nondegeneracy_det: C must be positive");
  if (!(t0 > 0.0)) throw DomainError("wiener_nondegeneracy_det: t0 must be positive");
  if (params.degenerate()) return 0.0;
  const double lam = params.lam();
  const double x = lam * t0;
  double braces;
  if (x < 1.0) {
    // Taylor series sum_{m>=4} (2^{m-2}(m-4) + 2)/m! x^m; every term is positive.
    double term_pow = x * x * x;  // x^3
    double fact = 6.0;            // 3!
    double two_pow = 2.0;         // 2^{m-2} at m = 3
    braces = 0.0;
    for (int m = 4; m <= 40; ++m) {
      term_pow *= x;
      fact *= m;
      two_pow *= 2.0;
      const double term = (two_pow * (m - 4) + 2.0) / fact * term_pow;
      braces += term;
      if (term < 1e-18 * braces) break;
    }
  } else {
    const double e1 = std::expm1(x);
    braces = 0.5 * x * std::expm1(2.0 * x) - e1 * e1;
  }
  const double loading = params.effective_loading();
  return C * C * std::pow(lam, -4) * loading * loading * braces;
}

}  // namespace ouedge
