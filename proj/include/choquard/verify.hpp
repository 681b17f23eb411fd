#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <choquard/grid.hpp>

namespace choquard {

struct SuiteViolation {
  std::string input;     // sampled inputs
  std::string expected;  // the relation that should hold
  std::string observed;  // measured values
};

struct SuiteResult {
  std::string suite_name;
  int cases_run = 0;
  std::vector<SuiteViolation> violations;
  double wall_time = 0.0;  // seconds; not part of the JSON form

  bool passed() const noexcept { return violations.empty(); }
};

/// Deterministic JSON object: suite, cases_run, passed, violations.
std::string to_json(const SuiteResult& r);

/// Suite names in their run order.
const std::vector<std::string>& suite_names();

/// Runs one suite; throws std::invalid_argument for an unknown name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

/// Trapezoid rule for ∫ exp(α u²) with u = 0 on the boundary. Throws SaturationError when α u² leaves the exp range.
double moser_integral(const GridFunction& u, double alpha);

/// A module invariant and the single suite that executes it.
struct CoverageEntry {
  std::string module;
  std::string invariant;
  std::string suite;
};
const std::vector<CoverageEntry>& coverage_manifest();

}  // namespace choquard
