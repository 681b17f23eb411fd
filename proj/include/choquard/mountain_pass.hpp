#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <choquard/functional.hpp>

namespace choquard {

/// Raised by find_K when saturation is reached before J(tφ) turns negative.
class NoNegativeEnergy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveStatus { converged, saturated, stalled };
std::string to_string(SolveStatus s);

struct SolveReport {
  double eps = 0.0;
  double lambda = 0.0;
  double energy_level = 0.0;
  double grad_norm = 0.0;
  double h1 = 0.0;
  double sup = 0.0;
  double K_path = 0.0;
  double m2 = 0.0;
  double K_grad_emp = 0.0;
  double l1_singular = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::stalled;
};

/// One JSON object, keys in the fixed order eps, lambda, energy, grad_norm,
/// h1, sup, K_path, m2, K_grad_emp, l1_singular, iterations, status; doubles
/// printed with 17 significant digits.
std::string to_json(const SolveReport& r);

struct SolverOptions {
  int path_points = 32;
  double tol = 1e-8;
  int max_iterations = 20000;
  int max_line_search_failures = 50;
  double armijo = 1e-4;
};

/// Convergence scale for the gradient tolerance: max(1, ‖u‖).
double gradient_scale(const GridFunction& u);

/// 1 + ‖-Δu‖ + ‖l_ε(u)‖ + ‖λ K[F(u)] f(u)‖ in L².
double residual_scale(const GridFunction& u, const Problem& p);
/// ‖residual(u)‖ ≤ tol · residual_scale(u).
bool residual_converged(const GridFunction& u, const Problem& p, double tol);

/// First Dirichlet eigenfunction sin(πx/Lx) sin(πy/Ly) scaled to h1_norm 1.
GridFunction build_phi(const Domain& dom);

struct MountainGeometry {
  double K = 0.0;   // J(Kφ) < 0
  double m2 = 0.0;  // max of J(tKφ), t ∈ [0, 1]
  double t_peak = 0.0;  // argmax in units of K
};

/// Doubles t from 1 until J(tφ) < 0, then locates the maximum over [0, K]
/// by a 256-point scan refined with golden section. Throws NoNegativeEnergy.
MountainGeometry find_K(const Problem& p);

/// Maximizer t > 0 of J(tv), or nullopt if J(tv) has no interior maximum
/// before saturation.
std::optional<double> ray_maximum(const GridFunction& v, const Problem& p, double t_guess = 1.0);

struct SolveResult {
  GridFunction u;
  SolveReport report;
  std::vector<double> path_energies;   // final discrete path, node order
  std::vector<double> polish_energies; // energy after each accepted polish step
  std::string message;                 // reason for a non-converged status
};

/// Mountain-pass search: the path maximum descends on the ray-maximum ridge
/// until its gradient is below 10·tol·scale, then is polished to tol·scale.
SolveResult mpa_solve(const Problem& p, const SolverOptions& opt = {});

/// Descent on the ridge from a starting field (warm start). Convergence needs
/// both the gradient test and residual_converged.
SolveResult polish(const Problem& p, const GridFunction& start, const SolverOptions& opt = {});

/// Fills h1, sup, K_grad_emp and l1_singular for u.
SolveReport bounds_report(const GridFunction& u, const Problem& p);

/// Inset used by l1_singular: one eighth of the shorter side.
double singular_margin(const Domain& d);

struct ContinuationStep {
  double eps = 0.0;
  SolveReport report;
  GridFunction u;
  double cauchy = 0.0;  // ‖u_k - u_{k-1}‖, 0 for the first step
  bool warm = false;    // true when the warm-started polish succeeded
  std::string error;    // non-empty when the step failed
  std::vector<double> polish_energies;
};

struct ContinuationResult {
  std::vector<ContinuationStep> steps;
  /// Residual norms at the last converged step, restricted to {u > δ0}:
  /// the ε-residual and the one with the singular limit in place of -l_ε.
  double eps_residual = 0.0;
  double limit_residual = 0.0;
  double delta0 = 0.0;
};

/// Solves along a strictly decreasing ε list in (0, 1/3), warm-starting each
/// step from the previous solution.
ContinuationResult continuation(const Problem& p, const std::vector<double>& eps_list,
                                const SolverOptions& opt = {});

/// L² norm of r over the nodes where u > threshold.
double restricted_l2(const GridFunction& r, const GridFunction& u, double threshold);

struct LambdaProbe {
  double lambda_bar = 0.0;  // smallest λ found to converge
  std::vector<std::pair<double, bool>> trials;
};

/// Bisects λ in [lo, hi] for solver success; hi must succeed.
LambdaProbe lambda_probe(const Problem& p, double lo, double hi, int steps, const SolverOptions& opt = {});

}  // namespace choquard
