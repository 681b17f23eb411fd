#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <choquard/config.hpp>
#include <choquard/format.hpp>
#include <choquard/mountain_pass.hpp>
#include <choquard/verify.hpp>

using namespace choquard;
namespace fs = std::filesystem;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitViolation = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string backend;
  std::string suite;
};

RunConfig load(const Globals& g, const CLI::App& app) {
  RunConfig c;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw UsageError("cannot read config file '" + g.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      c = parse_config(ss.str());
    } catch (const ConfigError& e) {
      throw UsageError(g.config_path + ": " + e.what());
    }
  }
  if (!g.out_dir.empty()) c.output_dir = g.out_dir;
  if (app.count("--seed")) c.seed = g.seed;
  if (!g.backend.empty()) c.problem.backend = parse_backend(g.backend);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(c.output_dir);
  return c;
}

SolverOptions options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.path_points = c.path_points;
  return o;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
}

int cmd_solve(const RunConfig& c) {
  Problem p(c.problem);
  SolveResult r = mpa_solve(p, options(c));
  const fs::path dir = c.output_dir;
  const std::string json = to_json(r.report);
  write_text(dir / "report.json", json + "\n");
  write_grd2((dir / "solution.grd2").string(), r.u);
  std::string csv = "node,t,energy\n";
  for (std::size_t i = 0; i < r.path_energies.size(); ++i)
    csv += std::to_string(i) + "," + fmt17(static_cast<double>(i) / (r.path_energies.size() - 1)) + "," +
           fmt17(r.path_energies[i]) + "\n";
  write_text(dir / "path.csv", csv);
  std::cout << json << "\n";
  if (r.report.status != SolveStatus::converged) {
    std::cerr << "solve: " << to_string(r.report.status) << ": " << r.message << "\n";
    return kExitSolver;
  }
  return 0;
}

int cmd_continue(const RunConfig& c) {
  Problem p(c.problem);
  ContinuationResult cr = continuation(p, c.eps_list, options(c));
  const fs::path dir = c.output_dir;
  std::string jsonl, csv = "eps,h1,sup,energy,K_grad_emp,cauchy\n";
  bool ok = true;
  for (std::size_t k = 0; k < cr.steps.size(); ++k) {
    const auto& s = cr.steps[k];
    jsonl += to_json(s.report) + "\n";
    write_grd2((dir / ("step_" + std::to_string(k) + ".grd2")).string(), s.u);
    csv += fmt17(s.eps) + "," + fmt17(s.report.h1) + "," + fmt17(s.report.sup) + "," + fmt17(s.report.energy_level) +
           "," + fmt17(s.report.K_grad_emp) + "," + fmt17(s.cauchy) + "\n";
    if (!s.error.empty()) {
      ok = false;
      std::cerr << "continue: eps=" << fmt17(s.eps) << ": " << s.error << "\n";
    }
  }
  write_text(dir / "continuation.jsonl", jsonl);
  write_text(dir / "continuation.csv", csv);
  write_text(dir / "limit.json", "{\"delta0\":" + fmt17(cr.delta0) + ",\"eps_residual\":" + fmt17(cr.eps_residual) +
                                     ",\"limit_residual\":" + fmt17(cr.limit_residual) + "}\n");
  std::cout << jsonl;
  return ok ? 0 : kExitSolver;
}

int cmd_verify(const RunConfig& c, const std::string& only) {
  if (!only.empty()) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), only) == names.end()) throw UsageError("unknown suite '" + only + "'");
  }
  std::string jsonl;
  bool ok = true;
  for (const auto& name : suite_names()) {
    if (!only.empty() && name != only) continue;
    SuiteResult r = run_suite(name, c.seed);
    jsonl += to_json(r) + "\n";
    ok = ok && r.passed();
    std::cerr << name << ": " << (r.passed() ? "pass" : "FAIL") << " (" << r.cases_run << " cases, "
              << r.violations.size() << " violations, " << std::fixed << std::setprecision(2) << r.wall_time
              << " s)\n" << std::defaultfloat;
  }
  write_text(fs::path(c.output_dir) / "verify.jsonl", jsonl);
  std::cout << jsonl;
  return ok ? 0 : kExitViolation;
}

int cmd_bench(const RunConfig& c) {
  std::string csv = "backend,nx,ny,mu,millis\n";
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int n : {16, 32, 64, 128}) {
    Domain d = Domain::unit_square(n);
    RieszKernel k(d, c.problem.mu);
    GridFunction g(d);
    for (double& v : g.values) v = U(rng);
    for (RieszBackend b : {RieszBackend::direct, RieszBackend::fft}) {
      const int reps = b == RieszBackend::fft ? 20 : (n >= 128 ? 1 : 3);
      auto t0 = std::chrono::steady_clock::now();
      double sink = 0.0;
      for (int r = 0; r < reps; ++r) sink += k.apply(g, b)[0];
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
      if (!std::isfinite(sink)) throw std::runtime_error("bench: non-finite output");
      csv += to_string(b) + "," + std::to_string(n) + "," + std::to_string(n) + "," + fmt17(c.problem.mu) + "," +
             fmt17(ms) + "\n";
    }
  }
  write_text(fs::path(c.output_dir) / "bench.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_dump_scalars(const RunConfig& c) {
  Problem p(c.problem);
  const auto& sp = c.problem.singular;
  const auto& m = c.problem.model;
  std::string csv = "t,l_eps,L_eps,Z,f,F\n";
  for (int i = 0; i <= 400; ++i) {
    double t = 0.01 * i;
    csv += fmt17(t) + "," + fmt17(p.l(t)) + "," + fmt17(p.L(t)) + "," + fmt17(Z_majorant(t, sp)) + "," + fmt17(m.f(t)) +
           "," + fmt17(m.F(t)) + "\n";
  }
  write_text(fs::path(c.output_dir) / "scalars.csv", csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mountain-pass solver for a regularized singular Choquard problem"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--out", g.out_dir, "output directory (overrides output_dir)");
  app.add_option("--seed", g.seed, "seed for sampled checks");
  app.add_option("--backend", g.backend, "Riesz backend: direct or fft")->check(CLI::IsMember({"direct", "fft"}));
  auto* solve = app.add_subcommand("solve", "one mountain-pass solve: report.json, solution.grd2, path.csv");
  auto* cont = app.add_subcommand("continue", "eps continuation: continuation.jsonl, step_<k>.grd2, continuation.csv");
  auto* verify = app.add_subcommand("verify", "run the property suites: verify.jsonl");
  verify->add_option("--suite", g.suite, "run a single suite");
  auto* bench = app.add_subcommand("bench", "Riesz backend timings: bench.csv");
  auto* dump = app.add_subcommand("dump-scalars", "tabulate l_eps, L_eps, Z, f, F: scalars.csv");
  for (auto* s : {solve, cont, verify, bench, dump}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig c = load(g, app);
    if (*solve) return cmd_solve(c);
    if (*cont) return cmd_continue(c);
    if (*verify) return cmd_verify(c, g.suite);
    if (*bench) return cmd_bench(c);
    if (*dump) return cmd_dump_scalars(c);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
