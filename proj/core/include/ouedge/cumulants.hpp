#pragma once

// Closed-form cumulants of the normalized integrated Levy-OU functional
// T^{-1/2} H_T, where H_T = Y_T - E[Y_T] and
//
//   X_t = X_0 - lam * int_0^t X_s ds + Z_t,
//   Y_t = int_0^t (gamma + beta * X_s) ds + rho * Z_t.
//
// Everything in this header is a pure function of its arguments.

#include <cstddef>
#include <span>
#include <vector>

namespace ouedge {

// Default cap on cumulant / expansion order.
inline constexpr int kMaxOrder = 12;

// Relative tolerance for the degeneracy flag |beta + rho*lam| ~ 0.
inline constexpr double kDegeneracyTolerance = 1e-12;

class ModelParams {
 public:
  // Throws DomainError unless lam > 0 and beta != 0 (all finite).
  ModelParams(double lam, double gamma, double beta, double rho);

  double lam() const noexcept { return lam_; }
  double gamma() const noexcept { return gamma_; }
  double beta() const noexcept { return beta_; }
  double rho() const noexcept { return rho_; }

  // beta + rho * lam, the scale of the Gaussian limit.
  double effective_loading() const noexcept { return beta_ + rho_ * lam_; }

  // True iff |beta + rho*lam| <= 1e-12 (|beta| + |rho*lam|).
  bool degenerate() const noexcept { return degenerate_; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double lam_;
  double gamma_;
  double beta_;
  double rho_;
  bool degenerate_;
};

enum class CumulantKind { StationaryF, DriverZ1 };

// kappa^{(1)}..kappa^{(r_max)} of either the stationary law F or of Z_1.
class CumulantVector {
 public:
  CumulantVector(CumulantKind kind, std::vector<double> values);

  CumulantKind kind() const noexcept { return kind_; }
  std::size_t max_order() const noexcept { return values_.size(); }
  // 1-based: kappa(1) is the mean.
  double kappa(int k) const;
  std::span<const double> values() const noexcept { return values_; }

 private:
  CumulantKind kind_;
  std::vector<double> values_;
};

// chi_{2,T}..chi_{p,T}: the cumulants of T^{-1/2} H_T at horizon T.
class ChiTable {
 public:
  ChiTable(double T, std::vector<double> chis);

  double horizon() const noexcept { return T_; }
  int max_order() const noexcept { return static_cast<int>(chis_.size()) + 1; }
  double chi(int r) const;
  double sigma() const { return chi(2); }
  std::span<const double> chis() const noexcept { return chis_; }

 private:
  double T_;
  std::vector<double> chis_;
};

// Kernel eta(lam, u) = (1 - exp(-lam u)) / lam.
double eta(double lam, double u);

// M_{r,T}(j) = lam^{-j} - T^{-1} lam^{-(j+1)} sum_{k=1}^{j} {lam eta(lam,T)}^k / k,
// with M_{r,T}(0) = 1. Equals T^{-1} int_0^T eta(lam,v)^j dv; independent of r.
double m_coeff(int r, int j, double lam, double T);

// kappa_F^{(k)} = kappa_{Z1}^{(k)} / (k lam).
CumulantVector stationary_cumulants(const CumulantVector& driver, double lam);

// r-th cumulant of T^{-1/2} H_T (r = 2 gives Sigma_T).
double chi(int r, const ModelParams& params, const CumulantVector& kappaF, double T);

// lim_{T->oo} T^{(r-2)/2} chi_{r,T} = lam r (rho + beta/lam)^r kappa_F^{(r)}; exactly 0 when
// params.degenerate().
double chi_limit(int r, const ModelParams& params, const CumulantVector& kappaF);

// chi_{2,T}..chi_{p,T} in one table.
ChiTable chi_table(int p, const ModelParams& params, const CumulantVector& kappaF, double T);

// int_0^T {rho + beta eta(lam, v)}^r dv in closed form.
double weight_integral(int r, const ModelParams& params, double T);

// Determinant of the lower bound on the Malliavin covariance of (X, H) at
// time t0 for a driver with Gaussian variance C > 0:
//   C^2 lam^{-4} (beta+rho lam)^2 { (lam t0 / 2)(e^{2 lam t0} - 1) - (e^{lam t0} - 1)^2 }.
// Exactly 0 when params.degenerate().
double wiener_nondegeneracy_det(double C, const ModelParams& params, double t0);

// n choose k as a double (exact for the orders used here).
double binomial(int n, int k);

}  // namespace ouedge
