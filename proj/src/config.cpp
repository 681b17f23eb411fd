#include <choquard/config.hpp>

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <choquard/format.hpp>

namespace choquard {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (int k = 0; k <= 6; ++k) eps_list.push_back(0.1 * std::ldexp(1.0, -k));
}

void RunConfig::validate() const {
  try {
    problem.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(tol > 0.0 && std::isfinite(tol))) throw ConfigError("tol must be positive");
  if (path_points < 16) throw ConfigError("path_points must be >= 16");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (output_dir.find_first_of("#\n") != std::string::npos || trim(output_dir) != output_dir)
    throw ConfigError("output_dir must not contain '#', newlines or surrounding spaces");
  if (eps_list.empty()) throw ConfigError("eps_list must not be empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < kEpsStar)) throw ConfigError("eps_list values must satisfy 0 < eps < 1/3");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ConfigError("eps_list must be strictly decreasing");
  }
}

namespace {

template <class T>
T parse_number(const std::string& v, const std::string& where) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(where + "invalid number '" + v + "'");
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  double r0 = c.problem.model.r0(), s = c.problem.model.s();
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (val.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    auto num = [&] { return parse_number<double>(val, where); };
    auto integer = [&] { return parse_number<int>(val, where); };
    ProblemConfig& p = c.problem;
    if (key == "lambda") p.lambda = num();
    else if (key == "mu") p.mu = num();
    else if (key == "eps") p.eps = num();
    else if (key == "family") {
      if (val == "power_log") p.singular.family = SingularFamily::power_log;
      else if (val == "pure_log") p.singular.family = SingularFamily::pure_log;
      else throw ConfigError(where + "family must be 'power_log' or 'pure_log'");
    } else if (key == "beta") p.singular.beta = num();
    else if (key == "q") p.singular.q = num();
    else if (key == "k") p.singular.k = integer();
    else if (key == "r0") r0 = num();
    else if (key == "s") s = num();
    else if (key == "Lx") p.dom.Lx = num();
    else if (key == "Ly") p.dom.Ly = num();
    else if (key == "nx") p.dom.nx = integer();
    else if (key == "ny") p.dom.ny = integer();
    else if (key == "backend") {
      try {
        p.backend = parse_backend(val);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where + e.what());
      }
    } else if (key == "tol") c.tol = num();
    else if (key == "path_points") c.path_points = integer();
    else if (key == "output_dir") c.output_dir = val;
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(val, where);
    else if (key == "eps_list") {
      c.eps_list.clear();
      std::istringstream items(val);
      std::string item;
      while (std::getline(items, item, ',')) c.eps_list.push_back(parse_number<double>(trim(item), where));
    } else {
      throw ConfigError(where + "unknown key '" + key + "'");
    }
  }
  if (r0 != c.problem.model.r0() || s != c.problem.model.s()) {
    try {
      c.problem.model = NonlinearityModel(r0, s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  c.validate();
  return c;
}

std::string render_config(const RunConfig& c) {
  const ProblemConfig& p = c.problem;
  std::ostringstream o;
  o << "lambda = " << fmt17(p.lambda) << "\n"
    << "mu = " << fmt17(p.mu) << "\n"
    << "eps = " << fmt17(p.eps) << "\n"
    << "family = " << (p.singular.family == SingularFamily::power_log ? "power_log" : "pure_log") << "\n"
    << "beta = " << fmt17(p.singular.beta) << "\n"
    << "q = " << fmt17(p.singular.q) << "\n"
    << "k = " << p.singular.k << "\n"
    << "r0 = " << fmt17(p.model.r0()) << "\n"
    << "s = " << fmt17(p.model.s()) << "\n"
    << "Lx = " << fmt17(p.dom.Lx) << "\n"
    << "Ly = " << fmt17(p.dom.Ly) << "\n"
    << "nx = " << p.dom.nx << "\n"
    << "ny = " << p.dom.ny << "\n"
    << "backend = " << to_string(p.backend) << "\n"
    << "tol = " << fmt17(c.tol) << "\n"
    << "path_points = " << c.path_points << "\n"
    << "eps_list = ";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) o << (i ? ", " : "") << fmt17(c.eps_list[i]);
  o << "\n"
    << "output_dir = " << c.output_dir << "\n"
    << "seed = " << c.seed << "\n";
  return o.str();
}

}  // namespace choquard
