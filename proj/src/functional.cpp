#include <choquard/functional.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace choquard {

void ProblemConfig::validate() const {
  if (!(lambda >= 0.0 && std::isfinite(lambda))) throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");
  if (!(eps > 0.0 && eps < kEpsStar)) throw std::invalid_argument("eps must satisfy 0 < eps < 1/3");
  singular.validate();
  if (singular.family == SingularFamily::power_log && !(singular.q < model.r0() - 1.0))
    throw std::invalid_argument("q must satisfy q < r0 - 1");
  dom.validate();
}

Problem::Problem(const ProblemConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  kernel_ = std::make_shared<const RieszKernel>(cfg_.dom, cfg_.mu);
  table_ = std::make_shared<const LEpsTable>(cfg_.eps, cfg_.singular, cfg_.model.t_saturation());
}

Problem Problem::with_eps(double eps) const {
  ProblemConfig c = cfg_;
  c.eps = eps;
  c.validate();
  return Problem(c, kernel_, std::make_shared<const LEpsTable>(eps, c.singular, c.model.t_saturation()));
}

Problem Problem::with_lambda(double lambda) const {
  ProblemConfig c = cfg_;
  c.lambda = lambda;
  c.validate();
  return Problem(c, kernel_, table_);
}

namespace {

void require_domain(const GridFunction& u, const Problem& p) {
  if (!(u.dom == p.domain())) throw std::invalid_argument("grid function does not match the problem domain");
}

// Nodal F(u), f(u) and the coupling term λ K[F(u)] f(u).
struct Coupling {
  GridFunction F, f, KF;
  double choquard = 0.0;
};

Coupling coupling(const GridFunction& u, const Problem& p, bool want_f) {
  const auto& m = p.config().model;
  Coupling c{GridFunction(u.dom), GridFunction(u.dom), GridFunction(u.dom)};
  for (std::size_t k = 0; k < u.size(); ++k) {
    c.F[k] = m.F(u[k]);
    if (want_f) c.f[k] = m.f(u[k]);
  }
  c.KF = p.kernel().apply(c.F, p.config().backend);
  c.choquard = l2_inner(c.KF, c.F);
  return c;
}

}  // namespace

double choquard_double(const GridFunction& u, const Problem& p) {
  require_domain(u, p);
  return coupling(u, p, false).choquard;
}

double energy(const GridFunction& u, const Problem& p) {
  require_domain(u, p);
  double local = 0.0;
  for (double v : u.values) local += p.L(v);
  local *= u.dom.cell_area();
  double cq = p.config().lambda == 0.0 ? 0.0 : choquard_double(u, p);
  return 0.5 * h1_norm_sq(u) + local - 0.5 * p.config().lambda * cq;
}

ResidualParts residual_parts(const GridFunction& u, const Problem& p) {
  require_domain(u, p);
  ResidualParts r{laplacian_apply(u), GridFunction(u.dom), GridFunction(u.dom)};
  for (std::size_t k = 0; k < u.size(); ++k) r.absorption[k] = p.l(u[k]);
  const double lambda = p.config().lambda;
  if (lambda != 0.0) {
    Coupling c = coupling(u, p, true);
    for (std::size_t k = 0; k < u.size(); ++k) r.coupling[k] = lambda * c.KF[k] * c.f[k];
  }
  return r;
}

Evaluation evaluate(const GridFunction& u, const Problem& p) {
  require_domain(u, p);
  const double lambda = p.config().lambda;
  Evaluation e;
  GridFunction rhs(u.dom);
  double local = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    local += p.L(u[k]);
    rhs[k] = p.l(u[k]);
  }
  if (lambda != 0.0) {
    Coupling c = coupling(u, p, true);
    e.choquard = c.choquard;
    for (std::size_t k = 0; k < u.size(); ++k) rhs[k] -= lambda * c.KF[k] * c.f[k];
  }
  e.energy = 0.5 * h1_norm_sq(u) + local * u.dom.cell_area() - 0.5 * lambda * e.choquard;
  e.gradient = u + poisson_solve(rhs);
  return e;
}

GridFunction h1_gradient(const GridFunction& u, const Problem& p) { return evaluate(u, p).gradient; }

double directional_derivative(const GridFunction& u, const GridFunction& v, const Problem& p) {
  require_domain(u, p);
  require_domain(v, p);
  const double lambda = p.config().lambda;
  double s = 0.0;
  if (lambda != 0.0) {
    Coupling c = coupling(u, p, true);
    for (std::size_t k = 0; k < u.size(); ++k) s += (p.l(u[k]) - lambda * c.KF[k] * c.f[k]) * v[k];
  } else {
    for (std::size_t k = 0; k < u.size(); ++k) s += p.l(u[k]) * v[k];
  }
  return h1_inner(u, v) + s * u.dom.cell_area();
}

namespace {

// Steps shorter than this are integrated directly; longer ones subtract the
// tabulated antiderivatives, which are accurate to ~1e-13 absolute.
constexpr double kShortSegment = 1e-3;

// ∫_b^a g by 5-point Gauss-Legendre, split at 0 where l_ε and f lose smoothness.
template <class G>
double segment_integral(G&& g, double b, double a) {
  using Rule = boost::math::quadrature::gauss<double, 5>;
  if (a == b) return 0.0;
  if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0))
    return segment_integral(g, b, 0.0) + segment_integral(g, 0.0, a);
  return Rule::integrate(g, b, a);
}

}  // namespace

double energy_difference(const GridFunction& a, const GridFunction& b, const Problem& p) {
  require_domain(a, p);
  require_domain(b, p);
  const auto& m = p.config().model;
  const double lambda = p.config().lambda;
  auto l = [&p](double t) { return p.l(t); };
  auto f = [&m](double t) { return m.f(t); };
  GridFunction dF(a.dom), sF(a.dom);
  double local = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const bool short_step = std::fabs(a[k] - b[k]) <= kShortSegment;
    local += short_step ? segment_integral(l, b[k], a[k]) : p.L(a[k]) - p.L(b[k]);
    if (lambda != 0.0) {
      double Fa = m.F(a[k]), Fb = m.F(b[k]);
      dF[k] = short_step ? segment_integral(f, b[k], a[k]) : Fa - Fb;
      sF[k] = Fa + Fb;
    }
  }
  double dq = 0.0;
  // ⟨KF_a, F_a⟩ - ⟨KF_b, F_b⟩ = ⟨K(F_a - F_b), F_a + F_b⟩ by symmetry of K.
  if (lambda != 0.0) dq = l2_inner(p.kernel().apply(dF, p.config().backend), sF);
  return 0.5 * h1_inner(a - b, a + b) + local * a.dom.cell_area() - 0.5 * lambda * dq;
}

GridFunction residual(const GridFunction& u, const Problem& p) {
  ResidualParts r = residual_parts(u, p);
  return r.laplacian + r.absorption - r.coupling;
}

GridFunction limit_residual(const GridFunction& u, const Problem& p) {
  ResidualParts r = residual_parts(u, p);
  GridFunction out = r.laplacian - r.coupling;
  for (std::size_t k = 0; k < u.size(); ++k) out[k] -= l_limit(u[k], p.config().singular);
  return out;
}

double singular_l1_diagnostic(const GridFunction& u, const Problem& p, double margin) {
  require_domain(u, p);
  const Domain& d = u.dom;
  if (!(margin > 0.0 && 2.0 * margin < std::min(d.Lx, d.Ly)))
    throw std::invalid_argument("margin must be positive and below half the domain width");
  double s = 0.0;
  for (int j = 0; j < d.ny; ++j) {
    double y = d.y(j);
    if (y < margin || y > d.Ly - margin) continue;
    for (int i = 0; i < d.nx; ++i) {
      double x = d.x(i);
      if (x < margin || x > d.Lx - margin) continue;
      double v = u.at(i, j);
      if (v > 0.0) s += std::fabs(l_limit(v, p.config().singular));
    }
  }
  return s * d.cell_area();
}

}  // namespace choquard
