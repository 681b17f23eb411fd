#include <choquard/grid.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "fftw_plans.hpp"

namespace choquard {

void Domain::validate() const {
  if (!(Lx > 0.0 && std::isfinite(Lx) && Ly > 0.0 && std::isfinite(Ly)))
    throw std::invalid_argument("domain lengths must be positive and finite");
  if (nx < 3 || ny < 3) throw std::invalid_argument("domain needs nx, ny >= 3");
}

GridFunction::GridFunction(const Domain& d, std::vector<double> v) : dom(d), values(std::move(v)) {
  if (values.size() != d.size()) throw std::invalid_argument("grid function size does not match domain");
}

namespace {

void require_same(const GridFunction& a, const GridFunction& b) {
  if (!(a.dom == b.dom)) throw std::invalid_argument("grid functions live on different domains");
}

}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double a) {
  for (double& v : values) v *= a;
  return *this;
}

GridFunction& GridFunction::axpy(double a, const GridFunction& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += a * o.values[k];
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double a, GridFunction b) { return b *= a; }

GridFunction laplacian_apply(const GridFunction& u) {
  const Domain& d = u.dom;
  const double ax = 1.0 / (d.hx() * d.hx()), ay = 1.0 / (d.hy() * d.hy());
  GridFunction out(d);
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      double c = u.at(i, j);
      double w = i > 0 ? u.at(i - 1, j) : 0.0;
      double e = i + 1 < d.nx ? u.at(i + 1, j) : 0.0;
      double s = j > 0 ? u.at(i, j - 1) : 0.0;
      double n = j + 1 < d.ny ? u.at(i, j + 1) : 0.0;
      out.at(i, j) = ax * (2.0 * c - w - e) + ay * (2.0 * c - s - n);
    }
  }
  return out;
}

// --- Poisson ---------------------------------------------------------------

namespace {

// DST-I plan plus the stencil eigenvalues for one grid shape.
struct PoissonPlan {
  fftw_plan plan = nullptr;
  std::vector<double> eig;  // row-major like the grid
  ~PoissonPlan() {
    if (plan) {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

std::shared_ptr<const PoissonPlan> poisson_plan(const Domain& d) {
  // Touch the planner mutex first so it outlives the cached plans.
  static std::mutex& planner = detail::fftw_planner_mutex();
  (void)planner;
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, double, double>, std::shared_ptr<const PoissonPlan>> cache;
  auto key = std::tuple{d.nx, d.ny, d.Lx, d.Ly};
  std::lock_guard lock(cache_mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto p = std::make_shared<PoissonPlan>();
  {
    std::vector<double> a(d.size()), b(d.size());
    std::lock_guard plock(detail::fftw_planner_mutex());
    p->plan = fftw_plan_r2r_2d(d.ny, d.nx, a.data(), b.data(), FFTW_RODFT00, FFTW_RODFT00,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!p->plan) throw std::runtime_error("FFTW could not plan the sine transform");
  const double hx = d.hx(), hy = d.hy();
  std::vector<double> ex(d.nx), ey(d.ny);
  for (int k = 0; k < d.nx; ++k) {
    double s = std::sin((k + 1) * std::numbers::pi / (2.0 * (d.nx + 1)));
    ex[k] = 4.0 * s * s / (hx * hx);
  }
  for (int l = 0; l < d.ny; ++l) {
    double s = std::sin((l + 1) * std::numbers::pi / (2.0 * (d.ny + 1)));
    ey[l] = 4.0 * s * s / (hy * hy);
  }
  p->eig.resize(d.size());
  for (int l = 0; l < d.ny; ++l)
    for (int k = 0; k < d.nx; ++k) p->eig[d.index(k, l)] = ex[k] + ey[l];
  cache.emplace(key, p);
  return p;
}

}  // namespace

GridFunction poisson_solve(const GridFunction& rhs) {
  const Domain& d = rhs.dom;
  auto p = poisson_plan(d);
  std::vector<double> in(rhs.values), coef(d.size());
  fftw_execute_r2r(p->plan, in.data(), coef.data());
  // RODFT00 applied twice scales by 2(n+1) per axis.
  const double norm = 4.0 * (d.nx + 1) * (d.ny + 1);
  for (std::size_t k = 0; k < coef.size(); ++k) coef[k] /= p->eig[k] * norm;
  GridFunction out(d);
  fftw_execute_r2r(p->plan, coef.data(), out.values.data());
  return out;
}

// --- norms -----------------------------------------------------------------

double l2_inner(const GridFunction& u, const GridFunction& v) {
  require_same(u, v);
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s * u.dom.cell_area();
}

double h1_inner(const GridFunction& u, const GridFunction& v) {
  require_same(u, v);
  const Domain& d = u.dom;
  auto U = [&](int i, int j) { return (i < 0 || j < 0 || i >= d.nx || j >= d.ny) ? 0.0 : u.at(i, j); };
  auto V = [&](int i, int j) { return (i < 0 || j < 0 || i >= d.nx || j >= d.ny) ? 0.0 : v.at(i, j); };
  double sx = 0.0, sy = 0.0;
  for (int j = 0; j < d.ny; ++j)
    for (int i = -1; i < d.nx; ++i) sx += (U(i + 1, j) - U(i, j)) * (V(i + 1, j) - V(i, j));
  for (int j = -1; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) sy += (U(i, j + 1) - U(i, j)) * (V(i, j + 1) - V(i, j));
  return sx * d.hy() / d.hx() + sy * d.hx() / d.hy();
}

double h1_norm_sq(const GridFunction& u) { return h1_inner(u, u); }

double h1_norm(const GridFunction& u) { return std::sqrt(h1_norm_sq(u)); }

double lp_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm requires 1 <= p < inf");
  double m = sup_norm(u);
  if (m == 0.0) return 0.0;
  // Scale by the maximum so large p neither overflows nor underflows.
  double s = 0.0;
  for (double v : u.values) s += std::pow(std::fabs(v) / m, p);
  return m * std::pow(s * u.dom.cell_area(), 1.0 / p);
}

double sup_norm(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::fabs(v));
  return m;
}

double min_value(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values) m = std::min(m, v);
  return m;
}

GridFunction node_gradient_sq(const GridFunction& u) {
  const Domain& d = u.dom;
  auto U = [&](int i, int j) { return (i < 0 || j < 0 || i >= d.nx || j >= d.ny) ? 0.0 : u.at(i, j); };
  GridFunction g(d);
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      double gx = (U(i + 1, j) - U(i - 1, j)) / (2.0 * d.hx());
      double gy = (U(i, j + 1) - U(i, j - 1)) / (2.0 * d.hy());
      g.at(i, j) = gx * gx + gy * gy;
    }
  }
  return g;
}

GridFunction weight_psi(const Domain& dom) {
  dom.validate();
  using std::numbers::pi;
  return GridFunction::sample(dom, [&](double x, double y) {
    double sx = std::sin(pi * x / dom.Lx), sy = std::sin(pi * y / dom.Ly);
    return sx * sx * sy * sy;
  });
}

double psi_gradient_ratio(const Domain& dom) {
  GridFunction psi = weight_psi(dom);
  GridFunction g = node_gradient_sq(psi);
  double r = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) r = std::max(r, g[k] / psi[k]);
  return r;
}

// --- GRD2 ------------------------------------------------------------------

namespace {

template <class T>
void put_le(std::vector<unsigned char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get_le(const unsigned char* p) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

constexpr std::size_t kHeaderBytes = 32;

}  // namespace

std::vector<unsigned char> encode_grd2(const GridFunction& u) {
  std::vector<unsigned char> out{'G', 'R', 'D', '2'};
  out.reserve(kHeaderBytes + 8 * u.size());
  put_le<std::uint32_t>(out, kGrd2Version);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.dom.nx));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.dom.ny));
  put_le<double>(out, u.dom.Lx);
  put_le<double>(out, u.dom.Ly);
  for (double v : u.values) put_le<double>(out, v);
  return out;
}

GridFunction decode_grd2(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), "GRD2", 4) != 0)
    throw std::runtime_error("not a GRD2 stream");
  const unsigned char* p = bytes.data();
  auto version = get_le<std::uint32_t>(p + 4);
  if (version != kGrd2Version) throw std::runtime_error("unsupported GRD2 version " + std::to_string(version));
  Domain d;
  d.nx = static_cast<int>(get_le<std::uint32_t>(p + 8));
  d.ny = static_cast<int>(get_le<std::uint32_t>(p + 12));
  d.Lx = get_le<double>(p + 16);
  d.Ly = get_le<double>(p + 24);
  d.validate();
  if (bytes.size() != kHeaderBytes + 8 * d.size()) throw std::runtime_error("GRD2 payload size mismatch");
  GridFunction u(d);
  for (std::size_t k = 0; k < d.size(); ++k) u[k] = get_le<double>(p + kHeaderBytes + 8 * k);
  return u;
}

void write_grd2(const std::string& path, const GridFunction& u) {
  auto bytes = encode_grd2(u);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

GridFunction read_grd2(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_grd2(bytes);
}

}  // namespace choquard
