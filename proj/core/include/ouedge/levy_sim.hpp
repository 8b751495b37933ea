#pragma once

// Exact samplers for the Levy-driven OU model with driver
//   Z_t = b0 t + sqrt(C) W_t + sum_{i <= N_t} xi_i,  N ~ Poisson(c t), xi ~ Exp(alpha),
// where b0 = b - c/alpha so that E[Z_1] = b. Nothing is time-discretized:
// the Gaussian part uses closed-form kernel variances and jumps are placed at
// their exact times.

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "ouedge/cumulants.hpp"
#include "ouedge/rng.hpp"

namespace ouedge {

struct GaussianDriver {
  double b = 0.0;  // E[Z_1]
  double C = 1.0;  // Gaussian variance per unit time, > 0
};

struct CompoundPoissonExpDriver {
  double b = 0.0;      // E[Z_1], jump mean included
  double c = 1.0;      // jump rate
  double alpha = 1.0;  // Exp(alpha) jump sizes
};

struct MixedDriver {
  double b = 0.0;
  double C = 1.0;
  double c = 1.0;
  double alpha = 1.0;
};

using DriverSpec = std::variant<GaussianDriver, CompoundPoissonExpDriver, MixedDriver>;

// Flattened view of any driver variant.
struct DriverComponents {
  double mean = 0.0;        // b = kappa_{Z1}^{(1)}
  double net_drift = 0.0;   // b0 = b - c/alpha
  double diffusion = 0.0;   // C
  double jump_rate = 0.0;   // c (0 when no jumps)
  double jump_alpha = 1.0;  // alpha
};

// Throws DomainError if the driver violates its invariants.
DriverComponents components(const DriverSpec& d);

// kappa^{(1)} = b, kappa^{(k)} = C 1{k=2} + c k!/alpha^k for k >= 2.
CumulantVector driver_cumulants(const DriverSpec& d, int r_max);

// Draw from the stationary law F: b0/lam + N(0, C/(2 lam)) + Gamma(c/lam, alpha).
double sample_stationary_x0(const DriverSpec& d, double lam, RngStream& rng);

// Poisson(mean): sequential inversion below mean 30, std::poisson_distribution above.
std::uint64_t sample_poisson(double mean, RngStream& rng);

// Exact sampler of H_T = Y_T - E[Y_T] with all T-dependent constants cached.
class HTSampler {
 public:
  HTSampler(const ModelParams& params, const DriverSpec& d, double T);

  double operator()(RngStream& rng) const;
  double horizon() const noexcept { return T_; }

 private:
  ModelParams params_;
  DriverSpec driver_;
  DriverComponents parts_;
  double T_;
  double x0_loading_;    // beta eta(lam, T)
  double deterministic_;  // -T (beta+rho lam) kappa_F^{(1)} + b0 int w
  double gauss_sd_;      // sqrt(C int w^2)
};

double sample_HT(const ModelParams& params, const DriverSpec& d, double T, RngStream& rng);

struct PathSample {
  std::vector<double> times;
  std::vector<double> X;
  std::vector<double> Y;
  double H_T = 0.0;
  std::uint64_t seed = 0;
};

// Grid-exact joint path of (X, Y) on n_steps equal steps over [0, T], started
// from the stationary law.
PathSample sample_path(const ModelParams& params, const DriverSpec& d, double T, int n_steps,
                       RngStream& rng);

// Same, started from a fixed X_0 = x0.
PathSample sample_path_from(const ModelParams& params, const DriverSpec& d, double T, int n_steps,
                            double x0, RngStream& rng);

// CSV with header `t,X,Y`, one row per grid point.
void write_path_csv(std::ostream& os, const PathSample& path);

}  // namespace ouedge
