#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <choquard/functional.hpp>

namespace choquard {

/// Raised for malformed or invalid configuration text.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem parameters plus run settings for the command-line front end.
struct RunConfig {
  ProblemConfig problem;
  std::vector<double> eps_list;  // default 0.1·2^{-k}, k = 0..6
  double tol = 1e-8;
  int path_points = 32;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  RunConfig();
  /// Throws ConfigError naming the violated rule.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// `key = value` lines with `#` comments. Unknown keys, duplicates and
/// malformed values raise ConfigError with the line number; missing keys keep
/// their defaults. The result is validated.
RunConfig parse_config(const std::string& text);

/// Text that parse_config maps back to an equal RunConfig.
std::string render_config(const RunConfig& c);

}  // namespace choquard
