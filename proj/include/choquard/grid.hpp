#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace choquard {

/// Rectangle [0, Lx] x [0, Ly] sampled at nx x ny interior nodes.
struct Domain {
  double Lx = 1.0, Ly = 1.0;
  int nx = 64, ny = 64;

  static Domain unit_square(int n) { return Domain{1.0, 1.0, n, n}; }

  double hx() const noexcept { return Lx / (nx + 1); }
  double hy() const noexcept { return Ly / (ny + 1); }
  double cell_area() const noexcept { return hx() * hy(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  double x(int i) const noexcept { return (i + 1) * hx(); }
  double y(int j) const noexcept { return (j + 1) * hy(); }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx + i; }

  /// Throws std::invalid_argument unless Lx, Ly > 0 and nx, ny >= 3.
  void validate() const;

  bool operator==(const Domain&) const = default;
};

/// Nodal values on the interior of a Domain; the boundary trace is zero.
/// Storage is row-major: values[j*nx + i] sits at (x_i, y_j).
struct GridFunction {
  Domain dom;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Domain& d, double fill = 0.0) : dom(d), values(d.size(), fill) {}
  GridFunction(const Domain& d, std::vector<double> v);

  /// Samples f(x, y) at the interior nodes.
  template <class F>
  static GridFunction sample(const Domain& d, F&& f) {
    GridFunction g(d);
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) g.values[d.index(i, j)] = f(d.x(i), d.y(j));
    return g;
  }

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
  double& at(int i, int j) { return values[dom.index(i, j)]; }
  double at(int i, int j) const { return values[dom.index(i, j)]; }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double a);
  /// this += a * o
  GridFunction& axpy(double a, const GridFunction& o);

  bool operator==(const GridFunction&) const = default;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double a, GridFunction b);

/// 5-point -Δ with zero Dirichlet padding.
GridFunction laplacian_apply(const GridFunction& u);

/// Solves -Δ_h u = rhs by discrete sine diagonalization.
GridFunction poisson_solve(const GridFunction& rhs);

/// Σ u v hx hy
double l2_inner(const GridFunction& u, const GridFunction& v);
/// Squared forward differences over all edges (boundary edges included) times cell area.
double h1_norm_sq(const GridFunction& u);
double h1_norm(const GridFunction& u);
/// H¹₀ inner product consistent with h1_norm_sq.
double h1_inner(const GridFunction& u, const GridFunction& v);
/// (Σ |u|^p hx hy)^{1/p}, p >= 1.
double lp_norm(const GridFunction& u, double p);
double sup_norm(const GridFunction& u);
double min_value(const GridFunction& u);

/// |∇u|² at each node from central differences with zero padding.
GridFunction node_gradient_sq(const GridFunction& u);

/// ψ = sin²(πx/Lx) sin²(πy/Ly).
GridFunction weight_psi(const Domain& dom);
/// Discrete sup over interior nodes of |∇ψ|²/ψ.
double psi_gradient_ratio(const Domain& dom);

/// GRD2 container: "GRD2", u32 version, u32 nx, u32 ny, f64 Lx, f64 Ly, then
/// nx*ny f64 row-major, all little-endian.
inline constexpr unsigned kGrd2Version = 1;
std::vector<unsigned char> encode_grd2(const GridFunction& u);
GridFunction decode_grd2(const std::vector<unsigned char>& bytes);
void write_grd2(const std::string& path, const GridFunction& u);
GridFunction read_grd2(const std::string& path);

}  // namespace choquard
