#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <choquard/mountain_pass.hpp>
#include <choquard/verify.hpp>

using namespace choquard;

TEST_CASE("suite names and unknown suite") {
  const auto& n = suite_names();
  CHECK(n.size() == 7);
  CHECK_THROWS_AS(run_suite("no_such_suite", 0), std::invalid_argument);
}

TEST_CASE("fast suites pass and rerun byte-identically") {
  for (const char* name : {"poisson_mms", "riesz_equiv", "hls_tm", "gradient_fd"}) {
    SuiteResult a = run_suite(name, 0), b = run_suite(name, 0);
    INFO(to_json(a));
    CHECK(a.passed());
    CHECK(a.cases_run > 0);
    CHECK(to_json(a) == to_json(b));
    CHECK(to_json(a).find("wall_time") == std::string::npos);
  }
}

TEST_CASE("suite JSON lists violations") {
  SuiteResult r;
  r.suite_name = "x";
  r.cases_run = 3;
  r.violations.push_back({"t=1", "a \"b\"", "c"});
  CHECK(to_json(r) == R"({"suite":"x","cases_run":3,"passed":false,"violations":[{"input":"t=1","expected":"a \"b\"","observed":"c"}]})");
}

TEST_CASE("moser integral") {
  Domain d{2.0, 1.5, 20, 13};
  CHECK(moser_integral(GridFunction(d), 3.0) == doctest::Approx(3.0).epsilon(1e-14));
  GridFunction phi = build_phi(Domain::unit_square(64));
  double prev = 0.0;
  for (double a = 0.25; a <= 4 * std::numbers::pi; a += 0.25) {
    double v = moser_integral(phi, a);
    CHECK(v >= prev);
    prev = v;
  }
  double m64 = moser_integral(phi, 4 * std::numbers::pi);
  double m128 = moser_integral(build_phi(Domain::unit_square(128)), 4 * std::numbers::pi);
  CHECK(std::fabs(m64 - m128) <= 0.1 * m128);
  CHECK_THROWS_AS(moser_integral(phi, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(moser_integral(GridFunction(d, 100.0), 1.0), SaturationError);
}

TEST_CASE("coverage manifest") {
  const auto& m = coverage_manifest();
  const auto& names = suite_names();
  std::set<std::string> suites(names.begin(), names.end()), used, modules;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : m) {
    CHECK(suites.count(e.suite) == 1);
    CHECK(seen.insert({e.module, e.invariant}).second);
    used.insert(e.suite);
    modules.insert(e.module);
  }
  CHECK(used == suites);
  for (const char* mod : {"scalar_terms", "grid", "riesz", "functional", "mountain_pass"}) CHECK(modules.count(mod) == 1);
  // Invariant counts per module.
  auto count = [&](const std::string& mod) {
    int c = 0;
    for (const auto& e : m) c += e.module == mod;
    return c;
  };
  CHECK(count("scalar_terms") == 8);
  CHECK(count("grid") == 4);
  CHECK(count("riesz") == 6);
  CHECK(count("functional") == 4);
  CHECK(count("mountain_pass") == 6);
}
