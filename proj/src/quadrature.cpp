#include <choquard/quadrature.hpp>

#include <limits>
#include <numbers>

namespace choquard {

namespace {

constexpr int kChecks = 5;

double cheb_node(int k, int n) {
  return std::cos(std::numbers::pi * (k + 0.5) / n);
}

double clenshaw(const double* c, int n, double s) {
  double b1 = 0.0, b2 = 0.0;
  for (int j = n - 1; j >= 1; --j) {
    double b0 = 2.0 * s * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return s * b1 - b2 + c[0];
}

}  // namespace

ChebyshevTable::ChebyshevTable(const std::function<double(double)>& integrand, double lo,
                               double hi, double value_at_lo, double abs_tol, double rel_tol,
                               const std::vector<double>& breakpoints)
    : lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw std::invalid_argument("ChebyshevTable: empty range");
  std::vector<double> cuts{lo};
  for (double p : breakpoints)
    if (p > lo && p < hi) cuts.push_back(p);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double g = value_at_lo;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    g = build_panel(integrand, cuts[i], cuts[i + 1], g, abs_tol, rel_tol, 0);
  right_edges_.reserve(panels_.size());
  for (const auto& p : panels_) right_edges_.push_back(p.b);
}

double ChebyshevTable::build_panel(const std::function<double(double)>& g, double a, double b,
                                   double ga, double abs_tol, double rel_tol, int depth) {
  const int n = kNodes;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);

  // Nodes (in reference coordinate s) followed by check points between nodes.
  std::vector<std::pair<double, int>> pts;
  pts.reserve(n + kChecks + 1);
  for (int k = 0; k < n; ++k) pts.push_back({cheb_node(k, n), k});
  for (int c = 0; c < kChecks; ++c) {
    int k = (c * (n - 1)) / (kChecks - 1);
    if (k >= n - 1) k = n - 2;
    pts.push_back({0.5 * (cheb_node(k, n) + cheb_node(k + 1, n)), n + c});
  }
  pts.push_back({1.0, n + kChecks});
  std::sort(pts.begin(), pts.end());

  std::vector<double> vals(n + kChecks + 1);
  // Relative tolerances below the quadrature round-off floor (50 ulp) are unreachable.
  const double inner_rel = std::max(1e-2 * rel_tol, 64.0 * std::numeric_limits<double>::epsilon());
  double x_prev = a, acc = ga;
  for (const auto& [s, id] : pts) {
    double x = mid + half * s;
    acc += integrate(g, x_prev, x, 1e-2 * abs_tol, inner_rel).value;
    vals[id] = acc;
    x_prev = x;
  }

  Panel panel{a, b, {}};
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += vals[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    panel.coef[j] = (j == 0 ? 1.0 : 2.0) * sum / n;
  }

  bool ok = true;
  for (int c = 0; c < kChecks && ok; ++c) {
    int k = (c * (n - 1)) / (kChecks - 1);
    if (k >= n - 1) k = n - 2;
    double s = 0.5 * (cheb_node(k, n) + cheb_node(k + 1, n));
    double exact = vals[n + c];
    double approx = clenshaw(panel.coef.data(), n, s);
    ok = std::fabs(approx - exact) <= abs_tol + rel_tol * std::fabs(exact);
  }
  if (!ok && depth < 60) {
    double gm = build_panel(g, a, mid, ga, abs_tol, rel_tol, depth + 1);
    return build_panel(g, mid, b, gm, abs_tol, rel_tol, depth + 1);
  }
  panels_.push_back(panel);
  return vals[n + kChecks];
}

double ChebyshevTable::operator()(double x) const {
  auto it = std::lower_bound(right_edges_.begin(), right_edges_.end(), x);
  if (it == right_edges_.end()) --it;
  const Panel& p = panels_[static_cast<std::size_t>(it - right_edges_.begin())];
  double s = (2.0 * x - p.a - p.b) / (p.b - p.a);
  return clenshaw(p.coef.data(), kNodes, s);
}

}  // namespace choquard
