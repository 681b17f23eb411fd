// One PASS/FAIL line per acceptance criterion. Usage: acceptance <cli> <workdir>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <choquard/scalar_terms.hpp>
#include <choquard/verify.hpp>

using namespace choquard;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s  %s  [%s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Violations grouped by their expected relation.
std::string summarize(const SuiteResult& r, const std::string& prefix) {
  std::map<std::string, int> counts;
  std::map<std::string, std::string> first;
  for (const auto& v : r.violations) {
    if (v.expected.rfind(prefix, 0) != 0) continue;
    if (counts[v.expected]++ == 0) first[v.expected] = v.input + " " + v.observed;
  }
  std::string s;
  for (const auto& [k, n] : counts) s += (s.empty() ? "" : "; ") + k + " x" + std::to_string(n) + " (" + first[k] + ")";
  return s;
}

int count_prefix(const SuiteResult& r, const std::string& prefix) {
  int n = 0;
  for (const auto& v : r.violations) n += v.expected.rfind(prefix, 0) == 0;
  return n;
}

void suite_criterion(int id, const std::string& suite, const std::string& what, double limit_s) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult r = run_suite(suite, 0);
  double t = seconds_since(t0);
  std::string detail = std::to_string(r.cases_run) + " cases, " + std::to_string(r.violations.size()) +
                       " violations, " + fixed(t) + " s";
  if (!r.passed()) detail += "; " + summarize(r, "");
  report(id, r.passed() && t <= limit_s, what, detail);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& log) {
  std::string cmd = "\"" + cli + "\" " + args + " > \"" + log.string() + "\" 2> \"" + log.string() + ".err\"";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: acceptance <cli> <workdir>\n");
    return 64;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  fs::remove_all(work);
  fs::create_directories(work);

  {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t violations = 0;
    const SingularParams sets[] = {SingularParams::power_log(0.5, 0.4), SingularParams::power_log(0.3, 0.2),
                                   SingularParams::power_log(0.7, 0.25)};
    for (const auto& p : sets) violations += check_scalar_estimates(p, 100000, 0).violations.size();
    double t = seconds_since(t0);
    report(1, violations == 0 && t <= 10.0, "scalar estimates, 1e5 samples x 3 parameter sets",
           std::to_string(violations) + " violations, " + fixed(t) + " s");
  }
  suite_criterion(2, "gradient_fd", "gradient consistency at 64x64", 60.0);
  suite_criterion(3, "riesz_equiv", "Riesz backend equivalence and self-adjointness", 60.0);
  suite_criterion(4, "poisson_mms", "Poisson manufactured solution order", 10.0);

  {
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = run_suite("continuation_regression", 0);
    double t = seconds_since(t0);
    int n5 = count_prefix(r, "solve:"), n6 = count_prefix(r, "continuation:");
    report(5, n5 == 0 && t <= 300.0, "reference mountain-pass solve",
           std::to_string(n5) + " violations" + (n5 ? "; " + summarize(r, "solve:") : ""));
    report(6, n6 == 0 && t <= 900.0, "continuation eps = 0.1 * 2^-k, k = 0..6",
           std::to_string(n6) + " violations, " + fixed(t) + " s for criteria 5 and 6" +
               (n6 ? "; " + summarize(r, "continuation:") : ""));
  }
  suite_criterion(7, "mp_geometry", "mountain-pass geometry for eps in {0.1, 0.05, 0.01}", 60.0);

  {
    bool same = true;
    std::string detail;
    std::vector<std::string> verify_out, solve_out;
    for (int run = 0; run < 2; ++run) {
      fs::path dv = work / ("verify_" + std::to_string(run)), ds = work / ("solve_" + std::to_string(run));
      int cv = run_cli(cli, "--out \"" + dv.string() + "\" --seed 0 verify", work / ("verify_" + std::to_string(run) + ".log"));
      int cs = run_cli(cli, "--out \"" + ds.string() + "\" --seed 0 solve", work / ("solve_" + std::to_string(run) + ".log"));
      if (run == 0) detail = "verify exit " + std::to_string(cv) + ", solve exit " + std::to_string(cs);
      if (cs != 0 || (cv != 0 && cv != 2)) same = false;
      verify_out.push_back(slurp(dv / "verify.jsonl"));
      solve_out.push_back(slurp(ds / "report.json"));
    }
    same = same && !verify_out[0].empty() && !solve_out[0].empty() && verify_out[0] == verify_out[1] &&
           solve_out[0] == solve_out[1];
    report(8, same, "byte-identical verify and solve reports across two runs", detail);
  }

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
