#include <doctest.h>

#include <random>
#include <string>

#include <choquard/config.hpp>

using namespace choquard;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool has(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }

}  // namespace

TEST_CASE("empty config gives the defaults") {
  RunConfig c = parse_config("");
  CHECK(c == RunConfig{});
  CHECK(c.problem.lambda == 1.0);
  CHECK(c.problem.mu == 0.5);
  CHECK(c.problem.singular.beta == 0.5);
  CHECK(c.problem.singular.q == 0.4);
  CHECK(c.problem.model.r0() == 1.5);
  CHECK(c.problem.model.s() == 1.5);
  CHECK(c.problem.eps == 0.1);
  CHECK(c.problem.dom.nx == 64);
  CHECK(c.problem.dom.ny == 64);
  CHECK(c.tol == 1e-8);
  CHECK(c.path_points == 32);
  CHECK(c.problem.backend == RieszBackend::fft);
  CHECK(c.seed == 0);
  REQUIRE(c.eps_list.size() == 7);
  CHECK(c.eps_list.back() == 0.1 / 64);
  CHECK(parse_config("# only a comment\n\n   \n") == RunConfig{});
}

TEST_CASE("values, comments and whitespace") {
  RunConfig c = parse_config("lambda = 2.5  # stronger coupling\n  nx=40\nbackend = direct\neps_list = 0.2, 0.1,0.05\nseed = 42\n");
  CHECK(c.problem.lambda == 2.5);
  CHECK(c.problem.dom.nx == 40);
  CHECK(c.problem.backend == RieszBackend::direct);
  CHECK(c.eps_list == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(c.seed == 42u);
  RunConfig r = parse_config("r0 = 1.7\ns = 1.2\nq = 0.5\n");
  CHECK(r.problem.model.r0() == 1.7);
  CHECK(r.problem.model.s() == 1.2);
}

TEST_CASE("errors name the line or the rule") {
  CHECK(has(error_of("eps = 0.4"), "eps < 1/3"));
  CHECK(has(error_of("q = 0.6\nr0 = 1.5"), "q < r0 - 1"));
  CHECK(has(error_of("\n\nfoo = 1"), "line 3"));
  CHECK(has(error_of("\n\nfoo = 1"), "unknown key 'foo'"));
  CHECK(has(error_of("nx 12"), "line 1"));
  CHECK(has(error_of("mu = abc"), "invalid number"));
  CHECK(has(error_of("nx = 12.5"), "invalid number"));
  CHECK(has(error_of("mu = 0.3\nmu = 0.4"), "duplicate key"));
  CHECK(has(error_of("backend = gpu"), "line 1"));
  CHECK(has(error_of("path_points = 8"), "path_points"));
  CHECK(has(error_of("eps_list = 0.1, 0.2"), "strictly decreasing"));
  CHECK(has(error_of("mu = 1.5"), "mu must lie in (0, 1)"));
  CHECK(has(error_of("tol = 0"), "tol"));
  CHECK(has(error_of("lambda ="), "missing value"));
}

TEST_CASE("render and parse round trip") {
  CHECK(parse_config(render_config(RunConfig{})) == RunConfig{});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    RunConfig c;
    c.problem.lambda = 3.0 * U(rng);
    c.problem.mu = 0.01 + 0.98 * U(rng);
    c.problem.eps = 0.3 * U(rng) + 1e-9;
    c.problem.singular.beta = 0.05 + 0.9 * U(rng);
    c.problem.singular.q = 0.01 + 0.3 * U(rng);
    c.problem.model = NonlinearityModel(1.35 + 0.6 * U(rng), 1.1 + 0.8 * U(rng));
    c.problem.dom = Domain{0.5 + U(rng), 0.5 + U(rng), 3 + i, 40 - i / 2};
    c.problem.backend = i % 2 ? RieszBackend::direct : RieszBackend::fft;
    c.tol = 1e-10 + U(rng) * 1e-6;
    c.path_points = 16 + i;
    c.eps_list = {0.3 * U(rng) + 0.01};
    c.eps_list.push_back(c.eps_list[0] * U(rng) * 0.9 + 1e-12);
    c.output_dir = "runs/case_" + std::to_string(i);
    c.seed = rng();
    if (i % 5 == 0) {
      c.problem.singular = SingularParams::pure_log(2 + i % 3);
    }
    c.validate();
    CHECK(parse_config(render_config(c)) == c);
  }
}
