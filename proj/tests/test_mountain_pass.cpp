#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <choquard/mountain_pass.hpp>

using namespace choquard;

namespace {

// Regression baselines from the first converged reference solve (64x64).
constexpr double kRefEnergy = 5.3778928856708941;
constexpr double kRefH1 = 3.5598213507406342;
constexpr double kRefSup = 2.2759354680909039;
constexpr double kRefEnergyHalfPhi = 0.17777183635612506;

const Problem& reference_problem() {
  static const Problem p{ProblemConfig{}};
  return p;
}

const SolveResult& reference_solve() {
  static const SolveResult r = mpa_solve(reference_problem());
  return r;
}

bool has(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }

}  // namespace

TEST_CASE("build_phi is normalized and positive") {
  for (int n : {16, 64}) {
    Domain d = Domain::unit_square(n);
    GridFunction phi = build_phi(d);
    CHECK(h1_norm(phi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*std::min_element(phi.values.begin(), phi.values.end()) > 0.0);
    double scale = phi.at(n / 2, n / 2) / (std::sin(std::numbers::pi * d.x(n / 2)) * std::sin(std::numbers::pi * d.y(n / 2)));
    CHECK(scale == doctest::Approx(1.0 / std::sqrt(std::numbers::pi * std::numbers::pi / 2.0)).epsilon(5.0 / (n * n)));
  }
  Domain r{2.0, 1.0, 24, 12};
  CHECK(h1_norm(build_phi(r)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("find_K brackets the mountain") {
  const Problem& p = reference_problem();
  MountainGeometry g = find_K(p);
  GridFunction phi = build_phi(p.domain());
  CHECK(g.K == 8.0);
  CHECK(energy(g.K * phi, p) < 0.0);
  CHECK(g.m2 > 0.0);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double t = U(rng);
    CHECK(energy(t * g.K * phi, p) <= g.m2 + 1e-10);
  }
  double K05 = find_K(p.with_lambda(0.5)).K, K1 = g.K, K2 = find_K(p.with_lambda(2.0)).K;
  CHECK(K05 >= K1);
  CHECK(K1 >= K2);
  CHECK(energy(0.5 * phi, p) == doctest::Approx(kRefEnergyHalfPhi).epsilon(1e-10));
}

TEST_CASE("find_K needs coupling") {
  ProblemConfig c;
  c.dom = Domain::unit_square(16);
  c.lambda = 0.0;
  CHECK_THROWS_AS(find_K(Problem(c)), std::invalid_argument);
}

TEST_CASE("ray maximum is a critical point along the ray") {
  const Problem& p = reference_problem();
  GridFunction phi = build_phi(p.domain());
  auto t = ray_maximum(phi, p, 1.0);
  REQUIRE(t.has_value());
  CHECK(std::fabs(directional_derivative(*t * phi, phi, p)) <= 1e-8);
  CHECK(*t == doctest::Approx(find_K(p).t_peak * 8.0).epsilon(1e-6));
}

TEST_CASE("bounds_report") {
  const Problem& p = reference_problem();
  SolveReport z = bounds_report(GridFunction(p.domain()), p);
  CHECK(z.h1 == 0.0);
  CHECK(z.sup == 0.0);
  CHECK(z.K_grad_emp == 0.0);
  CHECK(z.l1_singular == 0.0);
  std::vector<double> k;
  for (int n : {32, 64, 128}) {
    ProblemConfig c;
    c.dom = Domain::unit_square(n);
    k.push_back(bounds_report(1.5 * build_phi(c.dom), Problem(c)).K_grad_emp);
  }
  for (double v : k) {
    CHECK(std::isfinite(v));
    CHECK(std::fabs(v - k.back()) <= 0.1 * k.back());
  }
}

TEST_CASE("reference solve") {
  const Problem& p = reference_problem();
  const SolveResult& r = reference_solve();
  INFO(r.message);
  REQUIRE(r.report.status == SolveStatus::converged);
  CHECK(r.report.grad_norm <= 1e-8 * gradient_scale(r.u));
  CHECK(r.report.energy_level > 0.0);
  CHECK(r.report.energy_level <= r.report.m2 + 1e-10);
  CHECK(r.report.sup > 0.0);
  CHECK(min_value(r.u) >= -1e-7);
  CHECK(residual_converged(r.u, p, 1e-8));
  for (std::size_t i = 1; i < r.polish_energies.size(); ++i)
    CHECK(r.polish_energies[i] <= r.polish_energies[i - 1] + 1e-12 * std::fabs(r.polish_energies[i - 1]));
  CHECK(r.report.energy_level == doctest::Approx(kRefEnergy).epsilon(1e-6));
  CHECK(r.report.h1 == doctest::Approx(kRefH1).epsilon(1e-6));
  CHECK(r.report.sup == doctest::Approx(kRefSup).epsilon(1e-6));
  CHECK(r.path_energies.size() == 32);
}

TEST_CASE("warm polish stays at the solution") {
  const Problem& p = reference_problem();
  const SolveResult& r = reference_solve();
  SolveResult w = polish(p, r.u);
  CHECK(w.report.status == SolveStatus::converged);
  CHECK(h1_norm(w.u - r.u) <= 1e-6);
}

TEST_CASE("report JSON") {
  SolveReport r;
  r.eps = 0.1;
  r.status = SolveStatus::converged;
  std::string s = to_json(r);
  const char* keys[] = {"eps", "lambda", "energy", "grad_norm", "h1", "sup", "K_path",
                        "m2", "K_grad_emp", "l1_singular", "iterations", "status"};
  std::size_t pos = 0;
  for (const char* k : keys) {
    std::size_t at = s.find("\"" + std::string(k) + "\":", pos);
    REQUIRE(at != std::string::npos);
    pos = at;
  }
  CHECK(has(s, "\"eps\":0.10000000000000001"));
  CHECK(has(s, "\"status\":\"converged\""));
  CHECK(s.find('\n') == std::string::npos);
}

TEST_CASE("solver option checks") {
  SolverOptions o;
  o.path_points = 8;
  CHECK_THROWS_AS(mpa_solve(reference_problem(), o), std::invalid_argument);
  CHECK_THROWS_AS(continuation(reference_problem(), {0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(continuation(reference_problem(), {0.5}), std::invalid_argument);
}

TEST_CASE("short continuation on a coarse grid") {
  ProblemConfig c;
  c.dom = Domain::unit_square(24);
  Problem p(c);
  ContinuationResult cr = continuation(p, {0.1, 0.05, 0.025});
  REQUIRE(cr.steps.size() == 3);
  for (const auto& s : cr.steps) {
    INFO(s.error);
    CHECK(s.error.empty());
    CHECK(s.report.status == SolveStatus::converged);
  }
  CHECK(cr.steps[0].cauchy == 0.0);
  CHECK(cr.steps[1].warm);
  CHECK(cr.steps[1].cauchy > 0.0);
  CHECK(cr.delta0 > 0.0);
  // The two residuals differ exactly by the regularization gap on {u > δ0}.
  const auto& last = cr.steps.back();
  GridFunction gap(last.u.dom);
  for (std::size_t k = 0; k < gap.size(); ++k) gap[k] = p.with_eps(last.eps).l(last.u[k]) + l_limit(last.u[k], c.singular);
  double g = restricted_l2(gap, last.u, cr.delta0);
  CHECK(cr.limit_residual <= cr.eps_residual + 1.01 * g);
  CHECK(cr.limit_residual >= g - cr.eps_residual - 1e-12);
}

TEST_CASE("lambda probe") {
  ProblemConfig c;
  c.dom = Domain::unit_square(16);
  Problem p(c);
  LambdaProbe pr = lambda_probe(p, 0.05, 1.0, 3);
  CHECK(pr.trials.size() == 4);
  CHECK(pr.lambda_bar <= 1.0);
  CHECK(pr.lambda_bar > 0.05);
  CHECK(pr.trials.front().second);
}
