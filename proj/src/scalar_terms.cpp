#include <choquard/scalar_terms.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

namespace choquard {

namespace {

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) throw std::domain_error(std::string(what) + ": non-finite argument");
}

// log(t + ε/(t+ε)) written as log1p so that the zero at t = 1-ε is resolved.
double log_shift(double t, double eps) {
  return std::log1p(t * (t + eps - 1.0) / (t + eps));
}

// Uniform doubles in [0, 1) from a 64-bit engine, independent of the
// standard library's distribution implementation.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::log(lo) + unit(rng) * (std::log(hi) - std::log(lo)));
}

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return v;
}

std::vector<double> l_eps_breakpoints(double t, double eps) {
  std::vector<double> b{eps, std::sqrt(eps), 1.0 - eps};
  for (double x = 4.0 * eps; x < std::min(t, 1.0); x *= 4.0) b.push_back(x);
  return b;
}

// l_ε specialised for quadrature: arguments are known to be positive and
// finite, so validation and branching are hoisted out of the inner loop.
struct LEpsIntegrand {
  double eps;
  SingularParams p;
  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    double lg = log_shift(t, eps);
    if (p.family == SingularFamily::power_log)
      return -std::exp(p.q * std::log(t) - (p.beta + p.q) * std::log(t + eps)) * lg;
    if (p.k == 2) return -lg;
    return -std::pow(std::fabs(lg), p.k - 2) * lg;
  }
};

constexpr double kSafety = 1.01;
constexpr double kSlack = 1e-12;

}  // namespace

// --- SingularParams -------------------------------------------------------

SingularParams SingularParams::power_log(double beta, double q) {
  SingularParams p;
  p.family = SingularFamily::power_log;
  p.beta = beta;
  p.q = q;
  p.validate();
  return p;
}

SingularParams SingularParams::pure_log(int k) {
  SingularParams p;
  p.family = SingularFamily::pure_log;
  p.k = k;
  p.validate();
  return p;
}

void SingularParams::validate() const {
  if (family == SingularFamily::power_log) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  } else if (k < 2) {
    throw std::invalid_argument("k must be an integer >= 2");
  }
}

// --- scalar functions -----------------------------------------------------

double l_eps(double t, double eps, const SingularParams& p) {
  require_finite(t, "l_eps");
  require_finite(eps, "l_eps");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("l_eps: eps must lie in (0, 1)");
  if (t <= 0.0) return 0.0;
  double lg = log_shift(t, eps);
  if (p.family == SingularFamily::power_log)
    return -std::pow(t, p.q) / std::pow(t + eps, p.beta + p.q) * lg;
  if (p.k == 2) return -lg;
  return -std::pow(std::fabs(lg), p.k - 2) * lg;
}

double L_eps(double t, double eps, const SingularParams& p, double abs_tol) {
  require_finite(t, "L_eps");
  if (t < 0.0) throw std::domain_error("L_eps: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("L_eps: eps must lie in (0, 1)");
  // Integrate in y = log x: the ε-scale features become O(1) wide and the
  // integrand x l_ε(x) decays like x^{1+q} below, so the lower end is cut
  // where the tail is under 1e-15 relative.
  LEpsIntegrand l{eps, p};
  auto g = [&l](double y) {
    double x = std::exp(y);
    return x * l(x);
  };
  const double le = std::log(eps), yhi = std::log(t);
  const double yb = std::min(le, yhi);
  std::vector<double> cuts{le, std::log1p(-eps), yb - 4.0, yb - 12.0};
  for (double y = le + 4.0; y < yhi; y += 4.0) cuts.push_back(y);
  return integrate(g, yb - 36.0, yhi, abs_tol, 0.0, cuts).value;
}

double l_limit(double t, const SingularParams& p) {
  require_finite(t, "l_limit");
  if (t <= 0.0) return 0.0;
  double lg = std::log(t);
  if (p.family == SingularFamily::power_log) return std::pow(t, -p.beta) * lg;
  if (p.k == 2) return lg;
  return std::pow(std::fabs(lg), p.k - 2) * lg;
}

double pure_log_breakpoint(int k) {
  if (k < 2) throw std::invalid_argument("pure_log breakpoint requires k >= 2");
  // With x = -log t* the condition reads x^{k-2} e^x = 2/(k-1), increasing in x.
  const double target = 2.0 / (k - 1);
  auto h = [&](double x) { return (k - 2) * std::log(std::max(x, 1e-300)) + x - std::log(target); };
  if (k == 2) return 1.0 / target;
  double lo = 1e-300, hi = 1.0;
  while (h(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("pure_log breakpoint: no bracket");
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-14 * std::max(1.0, std::fabs(a)); };
  auto [a, b] = boost::math::tools::toms748_solve(h, lo, hi, tol, iters);
  if (iters >= 200) throw std::runtime_error("pure_log breakpoint: root finding failed");
  double x = 0.5 * (a + b);
  if (!(x > 0.0)) throw std::runtime_error("pure_log breakpoint: root outside (0, 1)");
  return std::exp(-x);
}

double Z_majorant(double t, const SingularParams& p) {
  require_finite(t, "Z_majorant");
  if (t <= 0.0) return 0.0;
  if (p.family == SingularFamily::power_log) {
    const double b = p.beta;
    if (t >= 1.0) return t - 0.5 + 1.0 / ((1.0 - b) * (1.0 - b));
    double tb = std::pow(t, 1.0 - b);
    return 0.5 * t * t + tb / ((1.0 - b) * (1.0 - b)) - tb * std::log(t) / (1.0 - b);
  }
  // -∫₀ᵗ |log s|^{k-2} log s ds = Γ(k, -log t) for t < 1.
  const int k = p.k;
  const double ts = pure_log_breakpoint(k);
  auto head = [&](double x) { return x * x + boost::math::tgamma(static_cast<double>(k), -std::log(x)); };
  if (t <= ts) return head(t);
  double lg = std::log(ts);
  double slope = 2.0 * ts - std::pow(std::fabs(lg), k - 2) * lg;
  return head(ts) + (t - ts) * slope;
}

// --- NonlinearityModel ----------------------------------------------------

namespace {
constexpr double kFTableLo = 1e-6;
}

NonlinearityModel::NonlinearityModel(double r0, double s) : r0_(r0), s_(s) {
  if (!(r0 > 1.0 && r0 < 2.0)) throw std::invalid_argument("r0 must lie in (1, 2)");
  if (!(s > 1.0 && s < 2.0)) throw std::invalid_argument("s must lie in (1, 2)");
  // Root of log f(t) = r0 log t + t^s = 700 on [1, 700^{1/s}].
  auto logf = [&](double t) { return r0 * std::log(t) + std::pow(t, s) - kSaturationExponent; };
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-15 * b; };
  t_sat_ = boost::math::tools::toms748_solve(logf, 1.0, std::pow(kSaturationExponent, 1.0 / s), tol, iters).first;
  const double lo = kFTableLo;
  const double hi = t_saturation();
  auto integrand = [this](double t) { return f(t); };
  // Near saturation f carries the relative noise of exp at argument ~700.
  const double cond = r0 + s * kSaturationExponent;
  const double rel = std::max(1e-13, 2.0 * cond * std::numeric_limits<double>::epsilon());
  table_ = std::make_shared<const ChebyshevTable>(integrand, lo, hi, F_direct(lo), 1e-300, rel,
                                                  std::vector<double>{1.0});
}

void NonlinearityModel::check_saturation(double t) const {
  if (t > t_sat_) throw SaturationError("nonlinearity saturated: f(t) exceeds e^700 at t = " + std::to_string(t));
}

double NonlinearityModel::f(double t) const {
  require_finite(t, "f");
  if (t <= 0.0) return 0.0;
  check_saturation(t);
  return std::pow(t, r0_) * std::exp(std::pow(t, s_));
}

double NonlinearityModel::fprime(double t) const {
  require_finite(t, "fprime");
  if (t <= 0.0) return 0.0;
  check_saturation(t);
  double ts = std::pow(t, s_);
  return std::pow(t, r0_ - 1.0) * std::exp(ts) * (r0_ + s_ * ts);
}

double NonlinearityModel::F_direct(double t) const {
  require_finite(t, "F");
  if (t <= 0.0) return 0.0;
  check_saturation(t);
  auto integrand = [this](double x) { return f(x); };
  return integrate(integrand, 0.0, t, 1e-300, 1e-13).value;
}

double NonlinearityModel::F(double t) const {
  require_finite(t, "F");
  if (t <= 0.0) return 0.0;
  check_saturation(t);
  if (t < kFTableLo || !table_->contains(t)) return F_direct(t);
  return (*table_)(t);
}

// --- LEpsTable ------------------------------------------------------------

namespace {
constexpr double kLTableLo = 1e-8;
}

LEpsTable::LEpsTable(double eps, const SingularParams& p, double t_max) : eps_(eps), params_(p) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("LEpsTable: eps must lie in (0, 1)");
  const double hi = std::max(t_max, 2.0);
  auto integrand = LEpsIntegrand{eps, p};
  table_ = std::make_shared<const ChebyshevTable>(integrand, kLTableLo, hi,
                                                  L_eps(kLTableLo, eps, p, 1e-20), 1e-13, 1e-13,
                                                  l_eps_breakpoints(hi, eps));
}

double LEpsTable::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (!table_->contains(t)) return L_eps(t, eps_, params_, t < kLTableLo ? 1e-20 : 1e-12);
  return (*table_)(t);
}

// --- estimate checks ------------------------------------------------------

double estimate_delta0() {
  // First positive root of -log(t + ε/(t+ε)) - t, minimized over ε < 1/3.
  double d = std::numeric_limits<double>::infinity();
  for (double eps : geomspace(1e-7, kEpsStar * (1.0 - 1e-9), 400)) {
    auto g = [eps](double t) { return -log_shift(t, eps) - t; };
    double prev = 1e-12;
    for (int i = 1; i <= 4000; ++i) {
      double t = 1e-3 * i;
      if (g(t) < 0.0) {
        std::uintmax_t iters = 100;
        auto tol = [](double x, double y) { return std::fabs(y - x) <= 1e-15; };
        auto [lo, hi] = boost::math::tools::toms748_solve(g, prev, t, tol, iters);
        d = std::min(d, lo);
        break;
      }
      prev = t;
    }
  }
  return d / kSafety;
}

ScalarConstants estimate_scalar_constants(const SingularParams& p) {
  if (p.family != SingularFamily::power_log)
    throw std::invalid_argument("scalar estimates are stated for the power_log family");
  const double b = p.beta;
  ScalarConstants c{};

  // m̃: L_ε is increasing on [0, 1-ε] so its sup there is L_ε(1-ε).
  double m = 0.0;
  for (double eps : geomspace(1e-7, 1.0 - 1e-7, 400)) m = std::max(m, L_eps(1.0 - eps, eps, p));
  c.m_tilde = kSafety * m;

  // k0 for p0 ∈ {2.5, 3}: sup of -L_ε(t)/t^{p0} over t ∈ [1-ε, 20], ε ∈ (0, 1/2].
  double k25 = 0.0, k3 = 0.0;
  for (double eps : geomspace(1e-7, 0.5, 120)) {
    auto ts = geomspace(1.0 - eps, 20.0, 600);
    double L = L_eps(ts[0], eps, p);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i > 0) L += integrate(LEpsIntegrand{eps, p}, ts[i - 1], ts[i], 1e-14).value;
      k25 = std::max(k25, -L / std::pow(ts[i], 2.5));
      k3 = std::max(k3, -L / std::pow(ts[i], 3.0));
    }
  }
  c.k0_p25 = kSafety * k25;
  c.k0_p3 = kSafety * k3;

  // C of |t l_ε(t)| <= C(1 + t^{2-β}).
  double C = 0.0;
  for (double eps : geomspace(1e-7, 1.0 - 1e-7, 300))
    for (double t : geomspace(1e-10, 25.0, 3000))
      C = std::max(C, std::fabs(t * l_eps(t, eps, p)) / (1.0 + std::pow(t, 2.0 - b)));
  c.C_tl = kSafety * C;

  c.delta0 = estimate_delta0();
  return c;
}

ViolationReport check_scalar_estimates(const SingularParams& p, int sample_count,
                                       unsigned long long seed) {
  p.validate();
  ScalarConstants c = estimate_scalar_constants(p);
  ViolationReport rep;
  rep.params = p;
  rep.samples_per_inequality = sample_count;
  rep.m_tilde = c.m_tilde;
  rep.k0_p25 = c.k0_p25;
  rep.k0_p3 = c.k0_p3;
  rep.C_tl = c.C_tl;
  rep.delta0 = c.delta0;
  const double b = p.beta;
  std::mt19937_64 rng(seed);
  auto record = [&](const char* name, double t, double eps, double lhs, double rhs) {
    rep.violations.push_back({name, t, eps, lhs, rhs});
  };

  // 0 <= -l_ε(t) <= t for t >= 1-ε, 0 < ε < 1/2.
  for (int i = 0; i < sample_count; ++i) {
    double eps = log_uniform(rng, 1e-6, 0.5);
    double t = log_uniform(rng, 1.0 - eps, 20.0);
    double ml = -l_eps(t, eps, p);
    if (ml < -kSlack) record("neg_l_nonneg", t, eps, ml, 0.0);
    if (ml > t + kSlack) record("neg_l_le_t", t, eps, ml, t);
  }
  // 0 < L_ε(t) < m̃ for 0 < t <= 1-ε, 0 < ε < 1.
  for (int i = 0; i < sample_count; ++i) {
    double eps = log_uniform(rng, 1e-6, 1.0 - 1e-6);
    double t = log_uniform(rng, std::min(1e-8, 0.5 * (1.0 - eps)), 1.0 - eps);
    double L = L_eps(t, eps, p);
    if (L < -kSlack) record("L_positive", t, eps, L, 0.0);
    if (L > c.m_tilde + kSlack) record("L_le_m_tilde", t, eps, L, c.m_tilde);
  }
  // |L_ε(t)| <= t^{2-β}/(2-β) + t^{1-β}/(1-β) + m̃.
  for (int i = 0; i < sample_count; ++i) {
    double eps = log_uniform(rng, 1e-6, 1.0 - 1e-6);
    double t = log_uniform(rng, 1e-8, 20.0);
    double L = std::fabs(L_eps(t, eps, p));
    double bound = std::pow(t, 2.0 - b) / (2.0 - b) + std::pow(t, 1.0 - b) / (1.0 - b) + c.m_tilde;
    if (L > bound + kSlack) record("abs_L_growth", t, eps, L, bound);
  }
  // L_ε(t) >= -k0 t^{p0} for t >= 1-ε, 0 < ε <= 1/2, p0 ∈ {2.5, 3}.
  for (int i = 0; i < sample_count; ++i) {
    double eps = log_uniform(rng, 1e-6, 0.5);
    double t = log_uniform(rng, 1.0 - eps, 20.0);
    double L = L_eps(t, eps, p);
    double r25 = -c.k0_p25 * std::pow(t, 2.5), r3 = -c.k0_p3 * std::pow(t, 3.0);
    if (L < r25 - kSlack) record("L_lower_p2.5", t, eps, L, r25);
    if (L < r3 - kSlack) record("L_lower_p3", t, eps, L, r3);
  }
  // |t l_ε(t)| <= C(1 + t^{2-β}).
  for (int i = 0; i < sample_count; ++i) {
    double eps = log_uniform(rng, 1e-6, 1.0 - 1e-6);
    double t = log_uniform(rng, 1e-8, 20.0);
    double lhs = std::fabs(t * l_eps(t, eps, p));
    double rhs = c.C_tl * (1.0 + std::pow(t, 2.0 - b));
    if (lhs > rhs + kSlack) record("t_l_growth", t, eps, lhs, rhs);
  }
  // -log(t + ε/(t+ε)) >= t for 0 <= t < δ0, 0 < ε < 1/3.
  for (int i = 0; i < sample_count; ++i) {
    double eps = log_uniform(rng, 1e-6, kEpsStar);
    double t = (i == 0) ? 0.0 : log_uniform(rng, 1e-8, c.delta0);
    double lhs = -log_shift(t, eps);
    if (lhs < t - kSlack) record("neg_log_shift_ge_t", t, eps, lhs, t);
  }
  return rep;
}

HypothesisReport check_hypotheses(const NonlinearityModel& m, int sample_count) {
  HypothesisReport h;
  h.f_prime_zero = m.fprime(0.0);
  double prev = 0.0;
  for (int i = 1; i <= sample_count; ++i) {
    double t = 20.0 * i / sample_count;
    double ratio = m.f(t) / std::pow(t, m.r0());
    if (ratio < prev * (1.0 - 1e-14)) h.ratio_monotone = false;
    prev = ratio;
  }
  double T0 = 0.0, A = std::numeric_limits<double>::infinity();
  std::vector<double> grid;
  for (int i = 0; i <= sample_count / 10; ++i) grid.push_back(h.T + (20.0 - h.T) * i / (sample_count / 10));
  for (double t : grid) {
    double F = m.F(t);
    T0 = std::max(T0, std::pow(t, m.gamma0()) * F / m.f(t));
    A = std::min(A, F / std::pow(t, h.gamma));
  }
  h.T0 = kSafety * T0;
  h.A = A / kSafety;
  for (double t : grid)
    if (std::pow(t, m.gamma0()) * m.F(t) > h.T0 * m.f(t)) h.growth_surrogate_holds = false;
  return h;
}

}  // namespace choquard
