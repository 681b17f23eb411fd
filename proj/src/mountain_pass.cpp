#include <choquard/mountain_pass.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include <choquard/format.hpp>

namespace choquard {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::saturated: return "saturated";
    case SolveStatus::stalled: return "stalled";
  }
  return "stalled";
}

std::string to_json(const SolveReport& r) {
  std::string s = "{";
  auto num = [&](const char* key, double v) { s += json_string(key) + ":" + fmt17(v) + ","; };
  num("eps", r.eps);
  num("lambda", r.lambda);
  num("energy", r.energy_level);
  num("grad_norm", r.grad_norm);
  num("h1", r.h1);
  num("sup", r.sup);
  num("K_path", r.K_path);
  num("m2", r.m2);
  num("K_grad_emp", r.K_grad_emp);
  num("l1_singular", r.l1_singular);
  s += json_string("iterations") + ":" + std::to_string(r.iterations) + ",";
  s += json_string("status") + ":" + json_string(to_string(r.status)) + "}";
  return s;
}

double gradient_scale(const GridFunction& u) { return std::max(1.0, h1_norm(u)); }

double residual_scale(const GridFunction& u, const Problem& p) {
  ResidualParts r = residual_parts(u, p);
  return 1.0 + lp_norm(r.laplacian, 2.0) + lp_norm(r.absorption, 2.0) + lp_norm(r.coupling, 2.0);
}

bool residual_converged(const GridFunction& u, const Problem& p, double tol) {
  return lp_norm(residual(u, p), 2.0) <= tol * residual_scale(u, p);
}

GridFunction build_phi(const Domain& dom) {
  dom.validate();
  using std::numbers::pi;
  GridFunction phi = GridFunction::sample(dom, [&](double x, double y) { return std::sin(pi * x / dom.Lx) * std::sin(pi * y / dom.Ly); });
  phi *= 1.0 / h1_norm(phi);
  return phi;
}

namespace {

// Energy that maps saturation and non-finite values to nullopt.
std::optional<double> safe_energy(const GridFunction& u, const Problem& p) {
  try {
    double e = energy(u, p);
    if (!std::isfinite(e)) return std::nullopt;
    return e;
  } catch (const SaturationError&) {
    return std::nullopt;
  }
}

}  // namespace

MountainGeometry find_K(const Problem& p) {
  if (!(p.config().lambda > 0.0)) throw std::invalid_argument("find_K requires lambda > 0");
  const GridFunction phi = build_phi(p.domain());
  const double t_cap = p.config().model.t_saturation() / sup_norm(phi);
  double t = 1.0;
  for (;;) {
    if (t > t_cap) throw NoNegativeEnergy("saturation reached before J(t phi) < 0");
    auto e = safe_energy(t * phi, p);
    if (!e) throw NoNegativeEnergy("saturation reached before J(t phi) < 0");
    if (*e < 0.0) break;
    t *= 2.0;
  }
  MountainGeometry g;
  g.K = t;
  auto J = [&](double s) { return energy((s * g.K) * phi, p); };
  constexpr int kScan = 256;
  int best = 0;
  double best_e = 0.0;
  for (int i = 1; i < kScan; ++i) {
    double e = J(static_cast<double>(i) / (kScan - 1));
    if (e > best_e) {
      best_e = e;
      best = i;
    }
  }
  // Golden section on the bracket around the scan maximum.
  double a = std::max(0, best - 1) / double(kScan - 1), b = std::min(kScan - 1, best + 1) / double(kScan - 1);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = J(c), fd = J(d);
  while ((b - a) * g.K > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = J(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = J(d);
    }
  }
  double s = 0.5 * (a + b), fs = J(s);
  g.m2 = std::max(best_e, fs);
  g.t_peak = fs >= best_e ? s : static_cast<double>(best) / (kScan - 1);
  return g;
}

std::optional<double> ray_maximum(const GridFunction& v, const Problem& p, double t_guess) {
  if (h1_norm(v) == 0.0 || !(t_guess > 0.0)) return std::nullopt;
  const double t_cap = p.config().model.t_saturation() / std::max(sup_norm(v), 1e-300);
  // Slope of t ↦ J(tv); saturation counts as descending.
  auto slope = [&](double t) {
    if (t >= t_cap) return -1.0;
    try {
      double s = directional_derivative(t * v, v, p);
      return std::isfinite(s) ? s : -1.0;
    } catch (const SaturationError&) {
      return -1.0;
    }
  };
  constexpr double kGrow = 1.25;
  constexpr int kMaxExpand = 400;
  double a = t_guess, b = t_guess;
  double ga = slope(a), gb = ga;
  if (ga > 0.0) {
    int n = 0;
    do {
      a = b;
      ga = gb;
      b *= kGrow;
      gb = slope(b);
      if (++n > kMaxExpand) return std::nullopt;
    } while (gb > 0.0);
  } else {
    int n = 0;
    do {
      b = a;
      gb = ga;
      a /= kGrow;
      ga = slope(a);
      if (++n > kMaxExpand) return std::nullopt;
    } while (ga <= 0.0);
  }
  if (gb == 0.0) return b;
  std::uintmax_t iters = 200;
  auto tol = [](double x, double y) { return std::fabs(y - x) <= 1e-15 * std::fabs(y); };
  auto [lo, hi] = boost::math::tools::toms748_solve(slope, a, b, ga, gb, tol, iters);
  return 0.5 * (lo + hi);
}

namespace {

// A field on the ridge {u : dJ(u)[u] = 0} with its energy and gradient.
struct RidgePoint {
  GridFunction u;
  double energy = 0.0;
  GridFunction gradient;
  double grad_norm = 0.0;
};

RidgePoint make_point(GridFunction u, const Problem& p) {
  Evaluation e = evaluate(u, p);
  if (!std::isfinite(e.energy)) throw SaturationError("non-finite energy");
  RidgePoint r{std::move(u), e.energy, std::move(e.gradient), 0.0};
  r.grad_norm = h1_norm(r.gradient);
  return r;
}

std::optional<RidgePoint> project(const GridFunction& v, const Problem& p) {
  auto t = ray_maximum(v, p, 1.0);
  if (!t) return std::nullopt;
  return make_point(*t * v, p);
}

enum class StepOutcome { accepted, rejected_all };

// Armijo backtracking on v ↦ max_t J(tv) from α = 1. Every rejected trial
// counts towards the consecutive-failure limit.
StepOutcome ridge_step(RidgePoint& cur, const Problem& p, const SolverOptions& opt, int& failures) {
  const double g2 = cur.grad_norm * cur.grad_norm;
  double alpha = 1.0;
  while (failures < opt.max_line_search_failures) {
    GridFunction v = cur.u;
    v.axpy(-alpha, cur.gradient);
    std::optional<RidgePoint> next;
    double dJ = 0.0;
    try {
      next = project(v, p);
      if (next) dJ = energy_difference(next->u, cur.u, p);
    } catch (const SaturationError&) {
      next.reset();
    }
    if (next && std::isfinite(dJ) && dJ <= -opt.armijo * alpha * g2) {
      cur = std::move(*next);
      failures = 0;
      return StepOutcome::accepted;
    }
    ++failures;
    alpha *= 0.5;
  }
  return StepOutcome::rejected_all;
}

double singular_margin_of(const Problem& p) { return singular_margin(p.domain()); }

void finish_report(SolveResult& res, const Problem& p, const RidgePoint& pt) {
  SolveReport b = bounds_report(pt.u, p);
  SolveReport& r = res.report;
  r.h1 = b.h1;
  r.sup = b.sup;
  r.K_grad_emp = b.K_grad_emp;
  r.l1_singular = b.l1_singular;
  r.eps = p.config().eps;
  r.lambda = p.config().lambda;
  r.energy_level = pt.energy;
  r.grad_norm = pt.grad_norm;
  res.u = pt.u;
}

// Ridge descent from an already projected point; appends to res.
void descend(RidgePoint& pt, const Problem& p, const SolverOptions& opt, double target, SolveResult& res,
             bool record) {
  int failures = 0;
  if (record) res.polish_energies.push_back(pt.energy);
  // The final polish also waits for the strong-form residual test.
  auto done = [&] {
    return pt.grad_norm <= target * gradient_scale(pt.u) && (!record || residual_converged(pt.u, p, target));
  };
  while (!done()) {
    if (res.report.iterations >= opt.max_iterations) {
      res.report.status = SolveStatus::stalled;
      res.message = "iteration limit reached";
      return;
    }
    ++res.report.iterations;
    if (ridge_step(pt, p, opt, failures) != StepOutcome::accepted) {
      res.report.status = SolveStatus::stalled;
      res.message = "line search failed " + std::to_string(failures) + " consecutive times";
      return;
    }
    if (record) res.polish_energies.push_back(pt.energy);
  }
  res.report.status = SolveStatus::converged;
}

void check_level(SolveResult& res, double m2) {
  const SolveReport& r = res.report;
  if (r.status != SolveStatus::converged) return;
  if (!(r.energy_level > 0.0 && r.energy_level <= m2 + 1e-10 && r.sup > 0.0)) {
    res.report.status = SolveStatus::stalled;
    res.message = "converged to a critical point outside (0, m2]";
  }
}

}  // namespace

double singular_margin(const Domain& d) { return std::min(d.Lx, d.Ly) / 8.0; }

SolveReport bounds_report(const GridFunction& u, const Problem& p) {
  SolveReport r;
  r.eps = p.config().eps;
  r.lambda = p.config().lambda;
  r.h1 = h1_norm(u);
  r.sup = sup_norm(u);
  const GridFunction psi = weight_psi(u.dom);
  const GridFunction g2 = node_gradient_sq(u);
  constexpr double kZa = 1e-12;
  double K = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] > 0.0) {
      K = std::max(K, psi[k] * g2[k] / Z_majorant(u[k], p.config().singular));
    } else if (g2[k] > 0.0) {
      K = std::max(K, psi[k] * g2[k] / (Z_majorant(0.0, p.config().singular) + kZa));
    }
  }
  r.K_grad_emp = K;
  r.l1_singular = singular_l1_diagnostic(u, p, singular_margin_of(p));
  return r;
}

SolveResult polish(const Problem& p, const GridFunction& start, const SolverOptions& opt) {
  SolveResult res;
  try {
    auto pt = project(start, p);
    if (!pt) {
      res.report.status = SolveStatus::stalled;
      res.message = "start has no maximum along its ray";
      res.u = start;
      res.report.eps = p.config().eps;
      res.report.lambda = p.config().lambda;
      return res;
    }
    descend(*pt, p, opt, opt.tol, res, true);
    finish_report(res, p, *pt);
  } catch (const SaturationError& e) {
    res.report.status = SolveStatus::saturated;
    res.message = e.what();
    res.u = start;
    res.report.eps = p.config().eps;
    res.report.lambda = p.config().lambda;
  }
  return res;
}

SolveResult mpa_solve(const Problem& p, const SolverOptions& opt) {
  if (opt.path_points < 16) throw std::invalid_argument("path_points must be >= 16");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  const MountainGeometry geo = find_K(p);
  const GridFunction phi = build_phi(p.domain());
  const GridFunction end = geo.K * phi;
  const int P = opt.path_points;

  SolveResult res;
  res.report.K_path = geo.K;
  res.report.m2 = geo.m2;
  try {
    std::vector<GridFunction> nodes(P);
    std::vector<double> E(P);
    std::vector<bool> on_ridge(P, false);
    for (int i = 0; i < P; ++i) {
      nodes[i] = (static_cast<double>(i) / (P - 1)) * end;
      E[i] = energy(nodes[i], p);
    }
    int failures = 0;
    RidgePoint top;
    for (;;) {
      // Lowest index wins ties.
      int star = static_cast<int>(std::max_element(E.begin(), E.end()) - E.begin());
      if (!on_ridge[star]) {
        auto pt = project(nodes[star], p);
        if (!pt) {
          res.report.status = SolveStatus::stalled;
          res.message = "path maximum has no ray maximum";
          res.u = nodes[star];
          res.path_energies = E;
          return res;
        }
        top = std::move(*pt);
      } else {
        top = make_point(nodes[star], p);
      }
      if (top.grad_norm <= 10.0 * opt.tol * gradient_scale(top.u)) break;
      if (res.report.iterations >= opt.max_iterations) {
        res.report.status = SolveStatus::stalled;
        res.message = "iteration limit reached on the path";
        finish_report(res, p, top);
        res.path_energies = E;
        return res;
      }
      ++res.report.iterations;
      if (ridge_step(top, p, opt, failures) != StepOutcome::accepted) {
        res.report.status = SolveStatus::stalled;
        res.message = "line search failed " + std::to_string(failures) + " consecutive times on the path";
        finish_report(res, p, top);
        res.path_energies = E;
        return res;
      }
      // Re-insert the moved node and re-lay the path as 0 → node → Kφ.
      nodes[star] = top.u;
      E[star] = top.energy;
      std::fill(on_ridge.begin(), on_ridge.end(), false);
      on_ridge[star] = true;
      for (int i = 1; i < P - 1; ++i) {
        if (i == star) continue;
        if (i < star) {
          nodes[i] = (static_cast<double>(i) / star) * top.u;
        } else {
          double s = static_cast<double>(i - star) / (P - 1 - star);
          nodes[i] = (1.0 - s) * top.u + s * end;
        }
        auto e = safe_energy(nodes[i], p);
        if (!e) throw SaturationError("path node saturated");
        E[i] = *e;
      }
    }
    res.path_energies = E;
    descend(top, p, opt, opt.tol, res, true);
    finish_report(res, p, top);
    check_level(res, geo.m2);
  } catch (const SaturationError& e) {
    res.report.status = SolveStatus::saturated;
    res.message = e.what();
    res.report.eps = p.config().eps;
    res.report.lambda = p.config().lambda;
    if (res.u.size() == 0) res.u = GridFunction(p.domain());
  }
  return res;
}

double restricted_l2(const GridFunction& r, const GridFunction& u, double threshold) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (u[k] > threshold) s += r[k] * r[k];
  return std::sqrt(s * u.dom.cell_area());
}

ContinuationResult continuation(const Problem& p, const std::vector<double>& eps_list, const SolverOptions& opt) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list is empty");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0 && eps_list[k] < kEpsStar)) throw std::invalid_argument("eps values must satisfy 0 < eps < 1/3");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw std::invalid_argument("eps_list must be strictly decreasing");
  }
  ContinuationResult out;
  std::optional<GridFunction> prev;
  for (double eps : eps_list) {
    ContinuationStep step;
    step.eps = eps;
    try {
      Problem pk = p.with_eps(eps);
      MountainGeometry geo = find_K(pk);
      SolveResult res;
      if (prev) {
        res = polish(pk, *prev, opt);
        step.warm = res.report.status == SolveStatus::converged;
      }
      if (!step.warm) res = mpa_solve(pk, opt);
      res.report.K_path = geo.K;
      res.report.m2 = geo.m2;
      check_level(res, geo.m2);
      step.report = res.report;
      step.u = res.u;
      step.polish_energies = res.polish_energies;
      if (res.report.status != SolveStatus::converged) step.error = res.message;
    } catch (const std::exception& e) {
      step.error = e.what();
      step.report.eps = eps;
      step.report.lambda = p.config().lambda;
      step.u = GridFunction(p.domain());
    }
    const bool ok = step.error.empty();
    if (ok && prev) step.cauchy = h1_norm(step.u - *prev);
    // A failed step leaves the next one to start cold.
    if (ok) prev = step.u;
    else prev.reset();
    out.steps.push_back(std::move(step));
  }
  for (auto it = out.steps.rbegin(); it != out.steps.rend(); ++it) {
    if (!it->error.empty()) continue;
    Problem pk = p.with_eps(it->eps);
    out.delta0 = estimate_delta0();
    out.eps_residual = restricted_l2(residual(it->u, pk), it->u, out.delta0);
    out.limit_residual = restricted_l2(limit_residual(it->u, pk), it->u, out.delta0);
    break;
  }
  return out;
}

LambdaProbe lambda_probe(const Problem& p, double lo, double hi, int steps, const SolverOptions& opt) {
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("lambda_probe needs 0 < lo < hi");
  LambdaProbe out;
  auto ok = [&](double lambda) {
    bool good = false;
    try {
      good = mpa_solve(p.with_lambda(lambda), opt).report.status == SolveStatus::converged;
    } catch (const NoNegativeEnergy&) {
      good = false;
    }
    out.trials.emplace_back(lambda, good);
    return good;
  };
  if (!ok(hi)) throw std::runtime_error("lambda_probe: solver fails at the upper end");
  for (int i = 0; i < steps; ++i) {
    double mid = 0.5 * (lo + hi);
    if (ok(mid)) hi = mid;
    else lo = mid;
  }
  out.lambda_bar = hi;
  return out;
}

}  // namespace choquard
