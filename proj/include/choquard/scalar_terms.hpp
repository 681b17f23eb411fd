#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <choquard/quadrature.hpp>

namespace choquard {

/// Raised when exp(t^s) would leave the representable range.
class SaturationError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Largest admissible log f(t) and exponent inside exp().
inline constexpr double kSaturationExponent = 700.0;

/// Upper end of the admissible ε range: min(1/3, 1/2).
inline constexpr double kEpsStar = 1.0 / 3.0;

enum class SingularFamily { power_log, pure_log };

/// Selects the singular absorption u^{-β}log u (power_log) or
/// |log u|^{k-2} log u (pure_log) together with its regularization.
struct SingularParams {
  SingularFamily family = SingularFamily::power_log;
  double beta = 0.5;
  double q = 0.4;
  int k = 2;

  static SingularParams power_log(double beta, double q);
  static SingularParams pure_log(int k);

  /// Throws std::invalid_argument naming the violated rule.
  void validate() const;

  bool operator==(const SingularParams&) const = default;
};

/// f(t) = t^{r0} exp(t^s) for t > 0, extended by zero on t <= 0.
///
/// Holds a piecewise Chebyshev table of F(t) = ∫₀ᵗ f built once by adaptive
/// quadrature; copies share the immutable table.
class NonlinearityModel {
 public:
  NonlinearityModel() : NonlinearityModel(1.5, 1.5) {}
  NonlinearityModel(double r0, double s);

  double r0() const noexcept { return r0_; }
  double s() const noexcept { return s_; }
  /// Exponent in t^{γ0} F(t) <= T0 f(t).
  double gamma0() const noexcept { return s_ - 1.0; }
  /// Exponent l for which f(t)/t^l is nondecreasing.
  double l_mono() const noexcept { return r0_; }
  /// Largest t accepted before f(t) exceeds e^700.
  double t_saturation() const noexcept { return t_sat_; }

  double f(double t) const;
  double fprime(double t) const;
  double F(double t) const;
  /// F by direct adaptive quadrature, bypassing the table.
  double F_direct(double t) const;

  bool operator==(const NonlinearityModel& o) const { return r0_ == o.r0_ && s_ == o.s_; }

 private:
  void check_saturation(double t) const;

  double r0_, s_;
  double t_sat_ = 0.0;
  std::shared_ptr<const ChebyshevTable> table_;
};

/// Regularized absorption l_ε(t); zero for t <= 0.
double l_eps(double t, double eps, const SingularParams& p);

/// L_ε(t) = ∫₀ᵗ l_ε by adaptive quadrature to absolute tolerance abs_tol.
/// Throws QuadratureError if the tolerance is not reached.
double L_eps(double t, double eps, const SingularParams& p, double abs_tol = 1e-12);

/// Pointwise singular limit of -l_ε: t^{-β} log t (power_log) or
/// |log t|^{k-2} log t (pure_log); zero for t <= 0.
double l_limit(double t, const SingularParams& p);

/// Breakpoint t* of the pure_log majorant, solving |log t|^{k-2}/t = 2/(k-1).
double pure_log_breakpoint(int k);

/// Gradient-estimate majorant Z(t), t >= 0.
double Z_majorant(double t, const SingularParams& p);

/// Tabulated L_ε for a fixed (ε, params), used inside energy evaluations.
class LEpsTable {
 public:
  LEpsTable(double eps, const SingularParams& p, double t_max);
  double operator()(double t) const;
  double eps() const noexcept { return eps_; }

 private:
  double eps_;
  SingularParams params_;
  std::shared_ptr<const ChebyshevTable> table_;
};

struct Violation {
  std::string inequality;  // e.g. "neg_l_le_t"
  double t = 0.0;
  double eps = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Outcome of sampling the closed-form l_ε / L_ε estimates.
struct ViolationReport {
  SingularParams params;
  int samples_per_inequality = 0;
  double m_tilde = 0.0;
  double k0_p25 = 0.0;  // p0 = 2.5
  double k0_p3 = 0.0;   // p0 = 3
  double C_tl = 0.0;
  double delta0 = 0.0;
  std::vector<Violation> violations;

  bool passed() const noexcept { return violations.empty(); }
};

/// Estimated constants of the l_ε estimates (reference-grid suprema × 1.01).
struct ScalarConstants {
  double m_tilde, k0_p25, k0_p3, C_tl, delta0;
};
ScalarConstants estimate_scalar_constants(const SingularParams& p);
/// δ0 of -log(t + ε/(t+ε)) >= t on [0, δ0) for every ε < 1/3 (family independent).
double estimate_delta0();

/// Samples every estimate at sample_count seeded (t, ε) points over its
/// validity range. Requires the power_log family.
ViolationReport check_scalar_estimates(const SingularParams& p, int sample_count,
                                       unsigned long long seed = 0);

/// Hypothesis probes for f on a reference grid.
struct HypothesisReport {
  bool ratio_monotone = true;  // f(t)/t^{r0} nondecreasing on (0, 20]
  double T = 1.0;
  double T0 = 0.0;          // t^{γ0}F(t) <= T0 f(t) on [T, 20]
  bool growth_surrogate_holds = true;
  double A = 0.0;           // F(t) >= A t^γ for t >= t0
  double gamma = 2.0;
  double t0 = 1.0;
  double f_prime_zero = 0.0;
};
HypothesisReport check_hypotheses(const NonlinearityModel& m, int sample_count = 20000);

}  // namespace choquard
