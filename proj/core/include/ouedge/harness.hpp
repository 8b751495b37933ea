#pragma once

// Monte Carlo validation of the Edgeworth expansion against the exact
// simulator. All results are deterministic functions of the configuration;
// the worker count only changes wall time.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ouedge/cumulants.hpp"
#include "ouedge/levy_sim.hpp"

namespace ouedge {

struct ExperimentConfig {
  ModelParams params;
  DriverSpec driver;
  std::vector<double> T_grid;
  std::vector<int> p_orders;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 1;
  std::vector<double> test_points;
  unsigned workers = 0;  // 0 = hardware concurrency
  int n_boot = 200;
  // Multiplies every chi_{r,T} used for comparison; 1 outside fault-injection runs.
  double chi_perturbation = 1.0;
};

// Throws ConfigError when the invariants of ExperimentConfig are violated.
void validate(const ExperimentConfig& cfg);

struct PsiEntry {
  int p = 2;
  double psi = 0.0;
  double gap = 0.0;  // |empirical - psi|
};

struct IndicatorCell {
  double T = 0.0;
  double a = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double psi_normal = 0.0;  // Psi_2, used for the informative flag
  bool informative = false;  // |empirical - Psi_2| > 4 se
  std::vector<PsiEntry> psi;
};

struct CumulantCell {
  double T = 0.0;
  int r = 1;
  double k_stat = 0.0;
  double boot_se = 0.0;
  double chi = 0.0;  // 0 for r = 1 (centered statistic)
};

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct MCReport {
  std::vector<IndicatorCell> cells;
  std::vector<CumulantCell> cumulants;
  std::vector<Check> checks;
  std::string config_hash;
  bool degenerate = false;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;

  bool all_checks_passed() const;
};

// Draws n replicates of T^{-1/2} H_T; replicate i uses RngStream(stream_seed, i).
std::vector<double> sample_normalized(const ModelParams& params, const DriverSpec& d, double T,
                                      std::size_t n, std::uint64_t stream_seed, unsigned workers);

// Seed of the replicate streams at position t_index of a T-grid.
std::uint64_t horizon_seed(std::uint64_t seed, std::size_t t_index);

MCReport run_validation(const ExperimentConfig& cfg, const std::string& config_hash = {});

struct ThetaHatResult {
  double T = 0.0;
  std::size_t n = 0;
  double theta0 = 0.0;          // kappa_F^{(1)}
  double mean_theta_hat = 0.0;
  double bias = 0.0;
  double bias_se = 0.0;
  double scaled_variance = 0.0;     // Var(sqrt(T)(theta_hat - theta0))
  double scaled_variance_se = 0.0;  // bootstrap
  double chi2 = 0.0;                // chi_{2,T}
  double scaled_skewness_k3 = 0.0;  // k_3 of sqrt(T)(theta_hat - theta0)
  double chi3 = 0.0;
  double ks_normal = 0.0;      // KS distance to N(0, chi_{2,T})
  double ks_edgeworth3 = 0.0;  // KS distance to the Psi_3 distribution function
};

// Estimates theta0 = E[X_0] by theta_hat = T^{-1} int_0^T X_s ds. Requires
// beta = 1, gamma = 0, rho = 0 (ConfigError otherwise).
ThetaHatResult theta_hat_demo(const ModelParams& params, const DriverSpec& d, double T, std::size_t n,
                              std::uint64_t seed, unsigned workers = 1, int n_boot = 200);

struct ConvergenceRow {
  int r = 2;
  double T = 0.0;
  double scaled = 0.0;  // T^{(r-2)/2} chi_{r,T}
  double limit = 0.0;
  double gap = 0.0;     // |scaled - limit|
};

struct ConvergenceSlope {
  int r = 2;
  std::optional<double> slope;  // log-log slope of gap vs T; empty when a gap is 0
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceSlope> slopes;
};

// Requires at least three horizons.
ConvergenceStudy convergence_study(const ModelParams& params, const CumulantVector& kappaF,
                                   const std::vector<double>& T_grid, const std::vector<int>& orders = {2, 3, 4});

}  // namespace ouedge
