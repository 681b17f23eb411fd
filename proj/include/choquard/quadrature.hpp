#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace choquard {

/// Thrown when an adaptive quadrature cannot reach its requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

/// One Gauss-Kronrod panel with the QUADPACK error estimate.
template <int Points, class F>
std::pair<double, double> kronrod(F& f, double lo, double hi) {
  using K = boost::math::quadrature::gauss_kronrod<double, Points>;
  using G = boost::math::quadrature::gauss<double, Points / 2>;
  const auto& xk = K::abscissa();
  const auto& wk = K::weights();
  const auto& xg = G::abscissa();
  const auto& wg = G::weights();
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);

  std::array<double, Points> vals{};
  double fc = f(c);
  vals[0] = fc;
  double rk = wk[0] * fc, rabs = std::fabs(rk);
  double rg = (xg[0] == 0.0) ? wg[0] * fc : 0.0;
  std::size_t gi = (xg[0] == 0.0) ? 1 : 0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    double f1 = f(c - h * xk[i]), f2 = f(c + h * xk[i]);
    vals[2 * i - 1] = f1;
    vals[2 * i] = f2;
    rk += wk[i] * (f1 + f2);
    rabs += wk[i] * (std::fabs(f1) + std::fabs(f2));
    if (gi < xg.size() && xg[gi] == xk[i]) rg += wg[gi++] * (f1 + f2);
  }
  double mean = 0.5 * rk;
  double rasc = wk[0] * std::fabs(fc - mean);
  for (std::size_t i = 1; i < xk.size(); ++i)
    rasc += wk[i] * (std::fabs(vals[2 * i - 1] - mean) + std::fabs(vals[2 * i] - mean));

  double result = rk * h;
  double err = std::fabs((rk - rg) * h);
  rasc *= std::fabs(h);
  rabs *= std::fabs(h);
  if (rasc != 0.0 && err != 0.0) err = rasc * std::min(1.0, std::pow(200.0 * err / rasc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (rabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    err = std::max(50.0 * kEps * rabs, err);
  return {result, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature (K21 by default) of f over [a, b].
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate is below max(abs_tol, rel_tol * |value|). Optional interior
/// breakpoints seed the initial partition. Throws QuadratureError when
/// max_intervals is exhausted.
template <int Points = 21, class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                     const std::vector<double>& breakpoints = {}, int max_intervals = 4000) {
  QuadResult out;
  if (a == b) return out;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  struct Piece {
    double lo, hi, value, error;
  };
  auto eval = [&](double lo, double hi) {
    auto [v, err] = detail::kronrod<Points>(f, lo, hi);
    return Piece{lo, hi, v, err};
  };
  auto by_error = [](const Piece& x, const Piece& y) { return x.error < y.error; };

  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Piece> heap;
  heap.reserve(64);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) heap.push_back(eval(cuts[i], cuts[i + 1]));
  std::make_heap(heap.begin(), heap.end(), by_error);

  // Round-off floor: error estimates cannot drop below a few ulps of Σ|value|.
  constexpr double kRoundoff = 64.0 * std::numeric_limits<double>::epsilon();
  auto totals = [&] {
    double v = 0.0, e = 0.0, l1 = 0.0;
    for (const auto& p : heap) {
      v += p.value;
      e += p.error;
      l1 += std::fabs(p.value);
    }
    return std::tuple{v, e, l1};
  };

  auto [value, error, l1] = totals();
  while (error > std::max({abs_tol, rel_tol * std::fabs(value), kRoundoff * l1})) {
    if (static_cast<int>(heap.size()) >= max_intervals) {
      throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) +
                                ", " + std::to_string(b) + "]",
                            error);
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Piece worst = heap.back();
    heap.pop_back();
    double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval cannot be split further in double precision.
      throw QuadratureError("quadrature interval underflow", error);
    }
    heap.push_back(eval(worst.lo, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(eval(mid, worst.hi));
    std::push_heap(heap.begin(), heap.end(), by_error);
    // Recompute from scratch rather than incrementally to avoid drift.
    std::tie(value, error, l1) = totals();
  }
  out.value = sign * value;
  out.error = error;
  out.intervals = static_cast<int>(heap.size());
  return out;
}

/// Piecewise Chebyshev interpolant of an antiderivative G(x) = G(lo) + ∫_lo^x g.
///
/// Panels are bisected until the interpolant matches directly integrated
/// values at off-node check points to abs_tol + rel_tol*|G|. The table is
/// immutable once built.
class ChebyshevTable {
 public:
  static constexpr int kNodes = 20;

  ChebyshevTable() = default;

  /// Builds the table of x ↦ value_at_lo + ∫_lo^x integrand on [lo, hi].
  ChebyshevTable(const std::function<double(double)>& integrand, double lo, double hi,
                 double value_at_lo, double abs_tol, double rel_tol,
                 const std::vector<double>& breakpoints = {});

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }
  std::size_t panel_count() const noexcept { return panels_.size(); }

  /// Evaluates the interpolant; x must lie in [lo(), hi()].
  double operator()(double x) const;

 private:
  struct Panel {
    double a, b;
    std::array<double, kNodes> coef;
  };

  double build_panel(const std::function<double(double)>& g, double a, double b, double ga,
                     double abs_tol, double rel_tol, int depth);

  std::vector<double> right_edges_;
  std::vector<Panel> panels_;
  double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace choquard
