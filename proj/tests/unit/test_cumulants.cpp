#include <doctest.h>

#include <cmath>
#include <random>

#include "ouedge/cumulants.hpp"
#include "ouedge/errors.hpp"
#include "oracles.hpp"

using namespace ouedge;

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

CumulantVector kappaF_of(std::vector<double> v) { return CumulantVector(CumulantKind::StationaryF, std::move(v)); }

}  // namespace

TEST_CASE("eta values and limits") {
  CHECK(eta(1.0, 0.0) == 0.0);
  CHECK(std::abs(eta(2.0, 50.0) - 0.5) < 1e-12);
  CHECK(eta(1.0, 1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-15));
  CHECK(eta(3.0, 1e6) == doctest::Approx(1.0 / 3.0));
  double prev = 0.0;
  for (double u = 0.0; u < 20.0; u += 0.25) {
    const double e = eta(0.7, u);
    CHECK(e >= prev);
    CHECK(e <= 1.0 / 0.7);
    prev = e;
  }
  CHECK_THROWS_AS(eta(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eta(1.0, -1.0), DomainError);
}

TEST_CASE("m_coeff examples") {
  CHECK(m_coeff(4, 0, 0.7, 3.0) == 1.0);
  CHECK(std::abs(m_coeff(2, 1, 1.0, 1e3) - 1.0) < 1e-2);
  CHECK(std::abs(m_coeff(2, 1, 1.0, 1e6) - 1.0) < 1e-5);
  const double want = oracle::gk([](double v) { return oracle::kernel(1.0, v); }, 0.0, 2.0) / 2.0;
  CHECK(rel_err(m_coeff(2, 1, 1.0, 2.0), want) < 1e-10);
  CHECK(m_coeff(2, 1, 0.3, 7.0) == m_coeff(6, 1, 0.3, 7.0));
  CHECK_THROWS_AS(m_coeff(2, 3, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(m_coeff(2, -1, 1.0, 1.0), DomainError);
}

TEST_CASE("m_coeff is the normalized integral of eta^j") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> lam_d(0.1, 4.0), T_d(0.1, 60.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double lam = lam_d(gen), T = T_d(gen);
    for (int j = 1; j <= 8; ++j) {
      const double want =
          oracle::gk_panels([&](double v) { return std::pow(oracle::kernel(lam, v), j); }, 0.0, T, 8) / T;
      CHECK(rel_err(m_coeff(8, j, lam, T), want) < 1e-10);
    }
  }
}

TEST_CASE("stationary cumulants") {
  const CumulantVector gauss(CumulantKind::DriverZ1, {0.4, 2.0, 0.0, 0.0});
  const auto f = stationary_cumulants(gauss, 2.0);
  CHECK(f.kind() == CumulantKind::StationaryF);
  CHECK(f.kappa(1) == doctest::Approx(0.2));
  CHECK(f.kappa(2) == doctest::Approx(0.5));
  CHECK(f.kappa(3) == 0.0);
  CHECK(f.kappa(4) == 0.0);

  // Compound Poisson with Exp(alpha) jumps: F is Gamma(c/lam, alpha), whose
  // cumulants are shape (k-1)! / rate^k.
  const double c = 1.5, alpha = 2.0, lam = 0.8;
  std::vector<double> z(6);
  z[0] = c / alpha;
  for (int k = 2; k <= 6; ++k) z[k - 1] = c * oracle::factorial(k) / std::pow(alpha, k);
  const auto g = stationary_cumulants(CumulantVector(CumulantKind::DriverZ1, z), lam);
  for (int k = 1; k <= 6; ++k) {
    const double gamma_cum = (c / lam) * oracle::factorial(k - 1) / std::pow(alpha, k);
    CHECK(rel_err(g.kappa(k), gamma_cum) < 1e-14);
  }

  const auto zero = stationary_cumulants(CumulantVector(CumulantKind::DriverZ1, {0, 0, 0}), 1.0);
  for (double v : zero.values()) CHECK(v == 0.0);

  CHECK_THROWS_AS(stationary_cumulants(f, 1.0), DomainError);
}

TEST_CASE("cumulant vector and model invariants") {
  CHECK_THROWS_AS(CumulantVector(CumulantKind::StationaryF, {1.0}), DomainError);
  CHECK_THROWS_AS(CumulantVector(CumulantKind::StationaryF, {0.0, -1.0}), DomainError);
  CHECK_THROWS_AS(ModelParams(0.0, 0, 1, 0), DomainError);
  CHECK_THROWS_AS(ModelParams(1.0, 0, 0, 0), DomainError);
  CHECK_THROWS_AS(ModelParams(1.0, NAN, 1, 0), DomainError);
  CHECK_FALSE(ModelParams(1, 0, 1, 0).degenerate());
  CHECK(ModelParams(2, 0, 1, -0.5).degenerate());
  CHECK_FALSE(ModelParams(2, 0, 1, -0.5 + 1e-9).degenerate());
}

TEST_CASE("chi matches the kernel integral form") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> lam_d(0.2, 3.0), T_d(1.0, 100.0), b_d(0.2, 2.0), rho_d(-1.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  const auto kf = kappaF_of({0.3, 1.1, 0.7, -0.4, 1.9, 2.3});
  for (int trial = 0; trial < 25; ++trial) {
    const double lam = lam_d(gen), T = T_d(gen), rho = rho_d(gen);
    const double beta = sign(gen) ? b_d(gen) : -b_d(gen);
    const ModelParams mp(lam, 0.0, beta, rho);
    for (int r = 2; r <= 6; ++r) {
      const double integral = oracle::gk_panels(
          [&](double v) { return std::pow(rho + beta * oracle::kernel(lam, v), r); }, 0.0, T, 16);
      const double kr = kf.kappa(r);
      const double want = std::pow(T, -0.5 * (r - 2)) *
                          (std::pow(beta * oracle::kernel(lam, T), r) * kr / T + lam * r * kr * integral / T);
      CHECK(rel_err(chi(r, mp, kf, T), want) < 1e-10);
    }
  }
}

TEST_CASE("chi examples") {
  const ModelParams mp(1.0, 0.0, 1.0, 0.0);
  const auto gauss = kappaF_of({0.0, 1.0, 0.0, 0.0});
  CHECK(chi(3, mp, gauss, 5.0) == 0.0);
  CHECK(chi(4, mp, gauss, 5.0) == 0.0);
  CHECK(std::abs(chi(2, mp, gauss, 1e3) - 2.0) < 0.02);
  CHECK(chi_limit(2, mp, gauss) == 2.0);
  CHECK_THROWS_AS(chi(5, mp, gauss, 5.0), DomainError);
  CHECK_THROWS_AS(chi(1, mp, gauss, 5.0), DomainError);
  CHECK_THROWS_AS(chi(2, mp, CumulantVector(CumulantKind::DriverZ1, {0.0, 1.0}), 5.0), DomainError);
}

TEST_CASE("chi_limit") {
  const ModelParams degen(2.0, 0.0, 1.0, -0.5);
  const auto kf = kappaF_of({1, 2, 3, 4, 5, 6});
  for (int r = 2; r <= 6; ++r) CHECK(chi_limit(r, degen, kf) == 0.0);

  // Gamma-OU with lam = c = alpha = 1: kappa_F^{(k)} = (k-1)!.
  const ModelParams mp(1.0, 0.0, 1.0, 0.5);
  const auto gamma = kappaF_of({1, 1, 2, 6});
  for (int r = 3; r <= 4; ++r) {
    const double scaled = std::pow(1e4, 0.5 * (r - 2)) * chi(r, mp, gamma, 1e4);
    CHECK(rel_err(scaled, chi_limit(r, mp, gamma)) < 5e-3);
  }
}

TEST_CASE("scaled chi approaches its limit monotonically") {
  const ModelParams mp(0.6, 0.0, -1.3, 0.4);
  const auto kf = kappaF_of({0.1, 0.9, 0.5, 1.2, -0.3, 0.8, 0.2, 1.0});
  for (int r = 2; r <= 8; ++r) {
    double prev = INFINITY;
    for (double T : {10.0, 1e2, 1e3, 1e4}) {
      const double gap = std::abs(std::pow(T, 0.5 * (r - 2)) * chi(r, mp, kf, T) - chi_limit(r, mp, kf));
      CHECK(gap < prev);
      prev = gap;
    }
  }
}

TEST_CASE("degenerate loading keeps T * Sigma_T bounded") {
  const ModelParams mp(1.5, 0.0, 0.75, -0.5);
  const auto kf = kappaF_of({0.0, 1.0});
  double hi = 0.0;
  for (double T : {1.0, 10.0, 1e2, 1e3, 1e4}) hi = std::max(hi, T * chi(2, mp, kf, T));
  // (beta/lam)^2 2 lam int_0^oo e^{-2 lam v} dv kappa + (beta eta)^2 kappa <= 2 (beta/lam)^2
  CHECK(hi <= 2.0 * std::pow(0.75 / 1.5, 2) * (1.0 + 1e-12));
}

TEST_CASE("chi_table") {
  const ModelParams mp(1.0, 0.0, 1.0, 0.5);
  const auto kf = kappaF_of({1, 1, 2, 6, 24});
  const auto t = chi_table(5, mp, kf, 7.0);
  CHECK(t.horizon() == 7.0);
  CHECK(t.max_order() == 5);
  for (int r = 2; r <= 5; ++r) CHECK(t.chi(r) == chi(r, mp, kf, 7.0));
  CHECK(t.sigma() == t.chi(2));
  CHECK_THROWS_AS(t.chi(6), DomainError);
}

TEST_CASE("weight_integral") {
  CHECK(weight_integral(1, ModelParams(1.0, 0.0, 1.0, 0.0), 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  for (int r = 1; r <= 4; ++r) CHECK(std::abs(weight_integral(r, ModelParams(1.0, 0.0, 1e-8, 1.0), 5.0) - 5.0) < 1e-6);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> lam_d(0.1, 3.0), T_d(0.1, 50.0), p_d(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double lam = lam_d(gen), T = T_d(gen), rho = p_d(gen);
    double beta = p_d(gen);
    if (std::abs(beta) < 0.05) beta = 0.5;
    const ModelParams mp(lam, 0.0, beta, rho);
    for (int r = 1; r <= 6; ++r) {
      const double want = oracle::gk_panels(
          [&](double v) { return std::pow(rho + beta * oracle::kernel(lam, v), r); }, 0.0, T, 16);
      // absolute floor guards the rare near-cancelling odd power
      CHECK(std::abs(weight_integral(r, mp, T) - want) <= 1e-10 * std::abs(want) + 1e-12 * T);
    }
  }
}

TEST_CASE("wiener determinant") {
  CHECK(wiener_nondegeneracy_det(1.0, ModelParams(2.0, 0.0, 1.0, -0.5), 1.0) == 0.0);
  const double e = std::exp(1.0);
  const double want = 0.5 * (e * e - 1.0) - (e - 1.0) * (e - 1.0);
  CHECK(wiener_nondegeneracy_det(1.0, ModelParams(1.0, 0.0, 1.0, 0.0), 1.0) ==
        doctest::Approx(want).epsilon(1e-13));
  // Series branch matches the direct formula where both are accurate.
  const double x = 0.9;
  const double direct = 0.5 * x * std::expm1(2 * x) - std::expm1(x) * std::expm1(x);
  CHECK(wiener_nondegeneracy_det(1.0, ModelParams(1.0, 0.0, 1.0, 0.0), x) ==
        doctest::Approx(direct).epsilon(1e-12));
  CHECK(wiener_nondegeneracy_det(1.0, ModelParams(1.0, 0.0, 1.0, 0.0), 1e-4) > 0.0);
  CHECK_THROWS_AS(wiener_nondegeneracy_det(0.0, ModelParams(1.0, 0.0, 1.0, 0.0), 1.0), DomainError);
}

TEST_CASE("pure functions are bit-reproducible") {
  const ModelParams mp(0.37, 0.0, 1.9, -0.21);
  const auto kf = kappaF_of({0.2, 1.3, 0.8, 2.1});
  for (int r = 2; r <= 4; ++r) CHECK(chi(r, mp, kf, 13.7) == chi(r, mp, kf, 13.7));
}
