#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <choquard/scalar_terms.hpp>

using namespace choquard;

namespace {

const SingularParams kHalfHalf = SingularParams::power_log(0.5, 0.5);
const SingularParams kRef = SingularParams::power_log(0.5, 0.4);

// Central differences with step h.
template <class F>
double dcentral(F&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Fourth-order central difference.
template <class F>
double dfive(F&& f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12.0 * h);
}

}  // namespace

TEST_CASE("SingularParams validation") {
  CHECK_THROWS_AS(SingularParams::power_log(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SingularParams::power_log(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SingularParams::pure_log(1), std::invalid_argument);
  CHECK_NOTHROW(SingularParams::pure_log(2));
}

TEST_CASE("l_eps examples") {
  CHECK(l_eps(0.0, 0.25, kHalfHalf) == 0.0);
  CHECK(l_eps(-3.0, 0.25, kHalfHalf) == 0.0);
  CHECK(std::fabs(l_eps(0.75, 0.25, kHalfHalf)) <= 1e-16);
  // 40-digit mpmath: -(1/1.1) log(1 + 0.1/1.1)
  CHECK(l_eps(1.0, 0.1, kHalfHalf) == doctest::Approx(-0.079101251808754333).epsilon(1e-14));
  CHECK_THROWS_AS(l_eps(std::numeric_limits<double>::quiet_NaN(), 0.1, kRef), std::domain_error);
  CHECK_THROWS_AS(l_eps(std::numeric_limits<double>::infinity(), 0.1, kRef), std::domain_error);
}

TEST_CASE("l_eps sign changes exactly at 1 - eps") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(1e-6, 20.0), ue(1e-6, 0.5);
  for (int i = 0; i < 20000; ++i) {
    double t = ut(rng), eps = ue(rng);
    double v = l_eps(t, eps, kRef);
    if (t < 1.0 - eps - 1e-12) CHECK(v >= 0.0);
    if (t > 1.0 - eps + 1e-12) CHECK(v <= 0.0);
  }
}

TEST_CASE("L_eps against high-precision quadrature") {
  CHECK(L_eps(0.0, 0.25, kHalfHalf) == 0.0);
  CHECK(L_eps(0.5, 0.25, kHalfHalf) == doctest::Approx(0.10837677878207811).epsilon(1e-12));
  double v = L_eps(2.0, 0.1, kHalfHalf);
  CHECK(v == doctest::Approx(0.11423821089298366).epsilon(1e-11));
  CHECK(L_eps(3.0, 0.01, SingularParams::power_log(0.3, 0.2)) ==
        doctest::Approx(0.11238506089087188).epsilon(1e-11));
  CHECK(L_eps(0.7, 0.05, SingularParams::pure_log(3)) ==
        doctest::Approx(0.31583614819151808).epsilon(1e-11));
  CHECK_THROWS_AS(L_eps(-1.0, 0.1, kRef), std::domain_error);

  auto c = estimate_scalar_constants(kHalfHalf);
  CHECK(L_eps(0.5, 0.25, kHalfHalf) > 0.0);
  CHECK(L_eps(0.5, 0.25, kHalfHalf) < c.m_tilde);
  CHECK(std::fabs(v) <= std::pow(2.0, 1.5) / 1.5 + std::pow(2.0, 0.5) / 0.5 + c.m_tilde);
}

TEST_CASE("L_eps table matches direct quadrature") {
  LEpsTable tab(0.1, kRef, 80.0);
  for (double t : {1e-9, 1e-5, 0.01, 0.3, 0.9, 1.0, 2.5, 7.0, 40.0, 79.0}) {
    CHECK(tab(t) == doctest::Approx(L_eps(t, 0.1, kRef)).epsilon(1e-12).scale(1.0));
  }
  CHECK(tab(0.0) == 0.0);
  CHECK(tab(-1.0) == 0.0);
}

TEST_CASE("l_limit examples and pointwise limit of -l_eps") {
  CHECK(l_limit(1.0, kHalfHalf) == 0.0);
  CHECK(l_limit(0.0, kHalfHalf) == 0.0);
  CHECK(l_limit(-2.0, kHalfHalf) == 0.0);
  CHECK(l_limit(0.25, kHalfHalf) == doctest::Approx(-2.7725887222397812).epsilon(1e-14));

  for (const auto& p : {kRef, SingularParams::power_log(0.3, 0.2), SingularParams::pure_log(2),
                        SingularParams::pure_log(4)}) {
    for (double t : {0.05, 0.3, 0.8, 1.5, 4.0, 12.0}) {
      double prev = std::numeric_limits<double>::infinity();
      const double first = std::fabs(-l_eps(t, 0.1, p) - l_limit(t, p));
      for (double eps = 1e-1; eps >= 1e-6; eps /= 2.0) {
        double err = std::fabs(-l_eps(t, eps, p) - l_limit(t, p));
        CHECK(err <= prev + 1e-12);
        prev = err;
      }
      CHECK(prev < 1e-2 * first);
    }
  }
}

TEST_CASE("Z majorant, power_log branches") {
  const auto p = kHalfHalf;
  CHECK(Z_majorant(0.0, p) == 0.0);
  CHECK(Z_majorant(1.0, p) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(Z_majorant(4.0, p) == doctest::Approx(7.5).epsilon(1e-15));
  CHECK(std::fabs(Z_majorant(std::nextafter(1.0, 0.0), p) - Z_majorant(1.0, p)) <= 1e-12);

  for (const auto& q : {kRef, SingularParams::power_log(0.3, 0.2), SingularParams::power_log(0.7, 0.25)}) {
    auto Z = [&](double t) { return Z_majorant(t, q); };
    const double b = q.beta;
    // C^1 at the branch point: one-sided differences.
    double h = 1e-7;
    double left = (Z(1.0) - Z(1.0 - h)) / h, right = (Z(1.0 + h) - Z(1.0)) / h;
    CHECK(std::fabs(left - right) <= 1e-6);
    CHECK(std::fabs(dcentral(Z, 1.0, 1e-5) - 1.0) <= 1e-8);
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
      double t = i / 1000.0;
      double closed = t - std::pow(t, -b) * std::log(t);
      double hh = 1e-3 * std::min(t, 1.0 - t);
      CHECK(dfive(Z, t, hh) == doctest::Approx(closed).epsilon(1e-8).scale(1.0));
      double h2 = std::min({1e-3, 0.5 * t, 0.5 * (1.0 - t)});
      double second = (Z(t + h2) - 2.0 * Z(t) + Z(t - h2)) / (h2 * h2);
      CHECK(second <= 1e-8 + 4e-16 * Z(t) / (h2 * h2));
      CHECK(Z(t) >= prev);
      prev = Z(t);
    }
  }
}

TEST_CASE("Z majorant, pure_log family") {
  CHECK(pure_log_breakpoint(2) == doctest::Approx(0.5).epsilon(1e-15));
  // k = 3: -log t = t, the omega constant.
  CHECK(pure_log_breakpoint(3) == doctest::Approx(0.56714329040978387).epsilon(1e-12));
  const auto p2 = SingularParams::pure_log(2);
  CHECK(Z_majorant(0.5, p2) == doctest::Approx(1.0965735902799727).epsilon(1e-13));
  const auto p3 = SingularParams::pure_log(3);
  CHECK(Z_majorant(0.56714329040978387, p3) == doctest::Approx(2.2816636131898449).epsilon(1e-11));
  CHECK(Z_majorant(0.3, p3) == doctest::Approx(1.8472488366624992).epsilon(1e-12));
  CHECK(Z_majorant(2.0, p3) == doctest::Approx(4.3678142780292126).epsilon(1e-11));
  CHECK(Z_majorant(0.0, p3) == 0.0);
  for (int k : {2, 3, 5}) {
    const auto p = SingularParams::pure_log(k);
    const double ts = pure_log_breakpoint(k);
    auto Z = [&](double t) { return Z_majorant(t, p); };
    CHECK(std::fabs(Z(std::nextafter(ts, 2.0)) - Z(ts)) <= 1e-12);
    double h = 1e-7;
    CHECK(std::fabs((Z(ts) - Z(ts - h)) / h - (Z(ts + h) - Z(ts)) / h) <= 1e-5);
    double prev = 0.0;
    for (int i = 1; i <= 400; ++i) {
      double t = 5.0 * i / 400.0;
      CHECK(Z(t) >= prev);
      prev = Z(t);
    }
  }
}

TEST_CASE("nonlinearity model") {
  NonlinearityModel m(1.5, 1.5);
  CHECK(m.f(0.0) == 0.0);
  CHECK(m.fprime(0.0) == 0.0);
  CHECK(m.f(-1.0) == 0.0);
  CHECK(m.F(0.0) == 0.0);
  CHECK(m.F(-3.0) == 0.0);
  CHECK(m.f(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-15));
  // 40-digit mpmath quadrature of ∫₀¹ t^1.5 exp(t^1.5) dt.
  CHECK(m.F(1.0) == doctest::Approx(0.77059184416115560).epsilon(1e-12));
  CHECK(m.F(2.0) == doctest::Approx(16.582014005241230).epsilon(1e-12));
  NonlinearityModel m2(1.2, 1.8);
  CHECK(m2.F(0.5) == doctest::Approx(0.11621840169412546).epsilon(1e-12));

  SUBCASE("two quadrature routes agree") {
    for (double t : {1e-7, 1e-3, 0.2, 1.0, 3.3, 10.0, 40.0})
      CHECK(m.F(t) == doctest::Approx(m.F_direct(t)).epsilon(1e-12));
  }
  SUBCASE("F' = f by finite differences") {
    for (int i = 1; i <= 200; ++i) {
      double t = 10.0 * i / 200.0;
      double h = 1e-3 * std::min(t, 1.0);
      CHECK(dfive([&](double x) { return m.F(x); }, t, h) ==
            doctest::Approx(m.f(t)).epsilon(1e-8));
    }
  }
  SUBCASE("F strictly increasing") {
    double prev = 0.0;
    for (int i = 1; i <= 500; ++i) {
      double F = m.F(20.0 * i / 500.0);
      CHECK(F > prev);
      prev = F;
    }
  }
  SUBCASE("saturation") {
    double ts = m.t_saturation();
    CHECK_NOTHROW(m.F(0.999 * ts));
    CHECK_THROWS_AS(m.f(1.01 * ts), SaturationError);
    CHECK_THROWS_AS(m.F(1.01 * ts), SaturationError);
  }
  CHECK_THROWS_AS(NonlinearityModel(2.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(NonlinearityModel(1.5, 1.0), std::invalid_argument);
}

TEST_CASE("nonlinearity monotone ratio, growth surrogate and growth bound") {
  NonlinearityModel m(1.5, 1.5);
  auto h = check_hypotheses(m);
  CHECK(h.ratio_monotone);
  CHECK(h.growth_surrogate_holds);
  CHECK(h.T0 > 0.0);
  CHECK(h.A > 0.0);
  CHECK(h.gamma > 1.0);
  CHECK(h.f_prime_zero == 0.0);
}

TEST_CASE("scalar estimates, boundary cases") {
  // at t = 0: -log(1) = 0 >= 0.
  CHECK(-std::log1p(0.0) >= 0.0);
  // at t = 1 - eps: l vanishes.
  for (double eps : {0.01, 0.2, 0.49}) CHECK(std::fabs(l_eps(1.0 - eps, eps, kRef)) <= 1e-15);
}

TEST_CASE("scalar estimates, seeded sample") {
  auto rep = check_scalar_estimates(kRef, 2000, 3);
  CHECK(rep.passed());
  CHECK(rep.m_tilde > 0.0);
  CHECK(rep.delta0 > 0.1);
  CHECK(rep.delta0 < 0.5);
  CHECK_THROWS_AS(check_scalar_estimates(SingularParams::pure_log(2), 10), std::invalid_argument);
}
