#pragma once

#include <memory>

#include <choquard/grid.hpp>
#include <choquard/riesz.hpp>
#include <choquard/scalar_terms.hpp>

namespace choquard {

/// Parameters of the regularized problem on a rectangle.
struct ProblemConfig {
  double lambda = 1.0;
  double mu = 0.5;
  double eps = 0.1;
  SingularParams singular = SingularParams::power_log(0.5, 0.4);
  NonlinearityModel model{1.5, 1.5};
  Domain dom = Domain::unit_square(64);
  RieszBackend backend = RieszBackend::fft;

  /// Throws std::invalid_argument naming the first violated rule. λ = 0 is
  /// accepted here so the local terms can be studied in isolation.
  void validate() const;

  bool operator==(const ProblemConfig&) const = default;
};

/// A validated ProblemConfig with its Riesz kernel and L_ε table built once.
class Problem {
 public:
  explicit Problem(const ProblemConfig& cfg);

  const ProblemConfig& config() const noexcept { return cfg_; }
  const Domain& domain() const noexcept { return cfg_.dom; }
  const RieszKernel& kernel() const noexcept { return *kernel_; }

  /// Same problem at another ε; the kernel is shared.
  Problem with_eps(double eps) const;
  /// Same problem at another λ; kernel and table are shared.
  Problem with_lambda(double lambda) const;

  double l(double t) const { return l_eps(t, cfg_.eps, cfg_.singular); }
  double L(double t) const { return (*table_)(t); }

 private:
  Problem(const ProblemConfig& cfg, std::shared_ptr<const RieszKernel> k, std::shared_ptr<const LEpsTable> t)
      : cfg_(cfg), kernel_(std::move(k)), table_(std::move(t)) {}

  ProblemConfig cfg_;
  std::shared_ptr<const RieszKernel> kernel_;
  std::shared_ptr<const LEpsTable> table_;
};

/// Energy with its H¹₀ gradient from a single Riesz application.
struct Evaluation {
  double energy = 0.0;
  double choquard = 0.0;  // ⟨K[F(u)], F(u)⟩
  GridFunction gradient;
};

/// ⟨K[F(u)], F(u)⟩ with the configured backend.
double choquard_double(const GridFunction& u, const Problem& p);
/// ‖u‖²/2 + Σ L_ε(u) hx hy - (λ/2) ⟨K[F(u)], F(u)⟩.
double energy(const GridFunction& u, const Problem& p);
/// u + (-Δ)⁻¹(l_ε(u) - λ K[F(u)] f(u)).
GridFunction h1_gradient(const GridFunction& u, const Problem& p);
Evaluation evaluate(const GridFunction& u, const Problem& p);
/// ⟨J'(u), v⟩ assembled nodally; equals ⟨h1_gradient(u), v⟩_{H¹}.
double directional_derivative(const GridFunction& u, const GridFunction& v, const Problem& p);
/// J(a) - J(b) accurate relative to its own size: the local and coupling
/// terms are integrated node by node between b and a rather than subtracted.
double energy_difference(const GridFunction& a, const GridFunction& b, const Problem& p);
/// -Δu + l_ε(u) - λ K[F(u)] f(u).
GridFunction residual(const GridFunction& u, const Problem& p);

/// The three parts of the residual, for scaling convergence tests.
struct ResidualParts {
  GridFunction laplacian, absorption, coupling;  // -Δu, l_ε(u), λ K[F(u)] f(u)
};
ResidualParts residual_parts(const GridFunction& u, const Problem& p);

/// Residual with the singular limit in place of -l_ε: -Δu - l_limit(u) - λ K[F(u)] f(u).
GridFunction limit_residual(const GridFunction& u, const Problem& p);

/// ∫ |l_limit(u)| over {u > 0} inside the rectangle inset by margin.
double singular_l1_diagnostic(const GridFunction& u, const Problem& p, double margin);

}  // namespace choquard
