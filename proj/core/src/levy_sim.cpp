#include "ouedge/levy_sim.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "ouedge/errors.hpp"

namespace ouedge {

namespace {

constexpr double kPoissonInversionLimit = 30.0;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(fmt::format("driver: {} must be positive", what));
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(fmt::format("driver: {} must be finite", what));
}

// (1/lam^3) * {lam u - 2(1 - e^{-lam u}) + (1 - e^{-2 lam u})/2} = int_0^u eta(lam, v)^2 dv
double eta_square_integral(double lam, double u) {
  const double x = lam * u;
  double s;
  if (x < 0.5) {
    // sum_{m>=3} (-1)^{m+1} (2^{m-1} - 2) x^m / m!
    double xm = x * x;
    double fact = 2.0;
    double two = 2.0;  // 2^{m-1} at m = 2
    s = 0.0;
    for (int m = 3; m <= 40; ++m) {
      xm *= x;
      fact *= m;
      two *= 2.0;
      const double term = (two - 2.0) / fact * xm;
      s += (m % 2 == 1) ? term : -term;
      if (term < 1e-18 * std::abs(s)) break;
    }
  } else {
    s = x + 2.0 * std::expm1(-x) - 0.5 * std::expm1(-2.0 * x);
  }
  return s / (lam * lam * lam);
}

}  // namespace

DriverComponents components(const DriverSpec& d) {
  struct Visitor {
    DriverComponents operator()(const GaussianDriver& g) const {
      require_finite(g.b, "b");
      require_positive(g.C, "C");
      return {g.b, g.b, g.C, 0.0, 1.0};
    }
    DriverComponents operator()(const CompoundPoissonExpDriver& g) const {
      require_finite(g.b, "b");
      require_positive(g.c, "c");
      require_positive(g.alpha, "alpha");
      return {g.b, g.b - g.c / g.alpha, 0.0, g.c, g.alpha};
    }
    DriverComponents operator()(const MixedDriver& g) const {
      require_finite(g.b, "b");
      require_finite(g.C, "C");
      if (g.C < 0.0) throw DomainError("driver: C must be nonnegative");
      require_positive(g.c, "c");
      require_positive(g.alpha, "alpha");
      return {g.b, g.b - g.c / g.alpha, g.C, g.c, g.alpha};
    }
  };
  return std::visit(Visitor{}, d);
}

CumulantVector driver_cumulants(const DriverSpec& d, int r_max) {
  if (r_max < 2) throw DomainError("driver_cumulants: r_max must be at least 2");
  const auto parts = components(d);
  std::vector<double> kappa(static_cast<std::size_t>(r_max), 0.0);
  kappa[0] = parts.mean;
  double fact = 1.0;
  for (int k = 2; k <= r_max; ++k) {
    fact *= k;
    double v = k == 2 ? parts.diffusion : 0.0;
    if (parts.jump_rate > 0.0) v += parts.jump_rate * fact / std::pow(parts.jump_alpha, k);
    kappa[static_cast<std::size_t>(k - 1)] = v;
  }
  return CumulantVector(CumulantKind::DriverZ1, std::move(kappa));
}

double sample_stationary_x0(const DriverSpec& d, double lam, RngStream& rng) {
  if (!(lam > 0.0)) throw DomainError("sample_stationary_x0: lam must be positive");
  const auto parts = components(d);
  double x = parts.net_drift / lam;
  if (parts.diffusion > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(parts.diffusion / (2.0 * lam)));
    x += normal(rng);
  }
  if (parts.jump_rate > 0.0) {
    std::gamma_distribution<double> gamma(parts.jump_rate / lam, 1.0 / parts.jump_alpha);
    x += gamma(rng);
  }
  return x;
}

std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("sample_poisson: bad mean");
  if (mean == 0.0) return 0;
  if (mean < kPoissonInversionLimit) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0) break;  // u beyond representable tail
    }
    return k;
  }
  std::poisson_distribution<std::uint64_t> poisson(mean);
  return poisson(rng);
}

HTSampler::HTSampler(const ModelParams& params, const DriverSpec& d, double T)
    : params_(params), driver_(d), parts_(components(d)), T_(T) {
  if (!(T > 0.0)) throw DomainError("sample_HT: T must be positive");
  const double lam = params.lam();
  const double kappaF1 = parts_.mean / lam;
  x0_loading_ = params.beta() * eta(lam, T);
  deterministic_ = -T * params.effective_loading() * kappaF1 +
                   parts_.net_drift * weight_integral(1, params, T);
  gauss_sd_ = parts_.diffusion > 0.0 ? std::sqrt(parts_.diffusion * weight_integral(2, params, T)) : 0.0;
}

double HTSampler::operator()(RngStream& rng) const {
  double h = x0_loading_ * sample_stationary_x0(driver_, params_.lam(), rng) + deterministic_;
  if (gauss_sd_ > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    h += gauss_sd_ * normal(rng);
  }
  if (parts_.jump_rate > 0.0) {
    const std::uint64_t n = sample_poisson(parts_.jump_rate * T_, rng);
    std::exponential_distribution<double> jump(parts_.jump_alpha);
    const double lam = params_.lam();
    for (std::uint64_t i = 0; i < n; ++i) {
      // T - tau is uniform on (0, T) as well
      const double v = T_ * rng.uniform();
      h += (params_.rho() + params_.beta() * eta(lam, v)) * jump(rng);
    }
  }
  return h;
}

double sample_HT(const ModelParams& params, const DriverSpec& d, double T, RngStream& rng) {
  return HTSampler(params, d, T)(rng);
}

PathSample sample_path(const ModelParams& params, const DriverSpec& d, double T, int n_steps,
                       RngStream& rng) {
  const double x0 = sample_stationary_x0(d, params.lam(), rng);
  return sample_path_from(params, d, T, n_steps, x0, rng);
}

PathSample sample_path_from(const ModelParams& params, const DriverSpec& d, double T, int n_steps,
                            double x0, RngStream& rng) {
  if (!(T > 0.0)) throw DomainError("sample_path: T must be positive");
  if (n_steps < 1) throw DomainError("sample_path: n_steps must be at least 1");
  const auto parts = components(d);
  const double lam = params.lam();
  const double dt = T / n_steps;
  const double decay = std::exp(-lam * dt);
  const double eta_dt = eta(lam, dt);
  const double eta_int = (lam * dt + std::expm1(-lam * dt)) / (lam * lam);  // int_0^dt eta

  // Per-step Gaussian increments (A, B) = (int e^{-lam(dt-s)} dW, int eta(dt-s) dW),
  // Cholesky factor of their covariance; the W increment itself is A + lam B.
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
  if (parts.diffusion > 0.0) {
    const double var_a = -std::expm1(-2.0 * lam * dt) / (2.0 * lam);
    const double em1 = std::expm1(-lam * dt);
    const double cov_ab = em1 * em1 / (2.0 * lam * lam);
    const double var_b = eta_square_integral(lam, dt);
    const double sc = std::sqrt(parts.diffusion);
    l11 = std::sqrt(var_a);
    l21 = cov_ab / l11;
    l22 = std::sqrt(std::max(0.0, var_b - l21 * l21));
    l11 *= sc;
    l21 *= sc;
    l22 *= sc;
  }

  PathSample path;
  path.seed = rng.seed();
  path.times.resize(static_cast<std::size_t>(n_steps) + 1);
  path.X.resize(path.times.size());
  path.Y.resize(path.times.size());
  path.X[0] = x0;
  path.Y[0] = 0.0;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> jump(parts.jump_alpha);
  for (int k = 0; k < n_steps; ++k) {
    double a = parts.net_drift * eta_dt;
    double b = parts.net_drift * eta_int;
    double dz = parts.net_drift * dt;
    if (parts.diffusion > 0.0) {
      const double g1 = normal(rng);
      const double g2 = normal(rng);
      const double ga = l11 * g1;
      const double gb = l21 * g1 + l22 * g2;
      a += ga;
      b += gb;
      dz += ga + lam * gb;
    }
    if (parts.jump_rate > 0.0) {
      const std::uint64_t n = sample_poisson(parts.jump_rate * dt, rng);
      for (std::uint64_t i = 0; i < n; ++i) {
        const double v = dt * rng.uniform();  // time from the jump to the step end
        const double xi = jump(rng);
        a += std::exp(-lam * v) * xi;
        b += eta(lam, v) * xi;
        dz += xi;
      }
    }
    const auto i = static_cast<std::size_t>(k);
    const double integral = eta_dt * path.X[i] + b;
    path.X[i + 1] = decay * path.X[i] + a;
    path.Y[i + 1] = path.Y[i] + params.gamma() * dt + params.beta() * integral + params.rho() * dz;
    path.times[i + 1] = (k + 1 == n_steps) ? T : dt * (k + 1);
  }
  const double kappaF1 = parts.mean / lam;
  const double mean_Y = (params.gamma() + params.beta() * kappaF1 + params.rho() * parts.mean) * T;
  path.H_T = path.Y.back() - mean_Y;
  return path;
}

void write_path_csv(std::ostream& os, const PathSample& path) {
  os << "t,X,Y\n";
  for (std::size_t i = 0; i < path.times.size(); ++i)
    os << fmt::format("{},{},{}\n", path.times[i], path.X[i], path.Y[i]);
}

}  // namespace ouedge
