#include <choquard/riesz.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <choquard/quadrature.hpp>

#include "fftw_plans.hpp"

namespace choquard {

std::string to_string(RieszBackend b) { return b == RieszBackend::fft ? "fft" : "direct"; }

RieszBackend parse_backend(const std::string& s) {
  if (s == "fft") return RieszBackend::fft;
  if (s == "direct") return RieszBackend::direct;
  throw std::invalid_argument("backend must be 'direct' or 'fft', got '" + s + "'");
}

double singular_cell_weight(double hx, double hy, double mu, double rel_tol) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");
  const double a = 0.5 * hx, b = 0.5 * hy, e = 2.0 - mu;
  // In polar form each quadrant contributes ∫ R(θ)^{2-μ}/(2-μ) dθ with R the
  // distance to the cell edge along θ.
  const double th0 = std::atan2(b, a);
  auto right = [&](double t) { return std::pow(a / std::cos(t), e); };
  auto top = [&](double t) { return std::pow(b / std::sin(t), e); };
  double s = integrate(right, 0.0, th0, 0.0, rel_tol).value + integrate(top, th0, std::numbers::pi / 2, 0.0, rel_tol).value;
  return 4.0 * s / e;
}

// Kernel spectrum on the zero-padded 2nx x 2ny torus plus the r2c/c2r plans.
struct RieszKernel::Spectrum {
  int px = 0, py = 0;
  std::vector<std::complex<double>> w_hat;
  fftw_plan forward = nullptr, backward = nullptr;

  ~Spectrum() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

RieszKernel::RieszKernel(const Domain& dom, double mu) : dom_(dom), mu_(mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0, 1)");
  dom.validate();
  const double hx = dom.hx(), hy = dom.hy(), area = hx * hy;
  const int tx = table_nx(), ty = table_ny();
  table_.resize(static_cast<std::size_t>(tx) * ty);
  for (int dj = -(dom.ny - 1); dj < dom.ny; ++dj) {
    for (int di = -(dom.nx - 1); di < dom.nx; ++di) {
      double r2 = (di * hx) * (di * hx) + (dj * hy) * (dj * hy);
      table_[(dj + dom.ny - 1) * tx + (di + dom.nx - 1)] = area * std::pow(r2, -0.5 * mu);
    }
  }
  table_[(dom.ny - 1) * tx + (dom.nx - 1)] = singular_cell_weight(hx, hy, mu);

  auto sp = std::make_shared<Spectrum>();
  sp->px = 2 * dom.nx;
  sp->py = 2 * dom.ny;
  const int px = sp->px, py = sp->py, pc = px / 2 + 1;
  std::vector<double> real(static_cast<std::size_t>(px) * py, 0.0);
  sp->w_hat.resize(static_cast<std::size_t>(pc) * py);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto* c = reinterpret_cast<fftw_complex*>(sp->w_hat.data());
    sp->forward = fftw_plan_dft_r2c_2d(py, px, real.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
    sp->backward = fftw_plan_dft_c2r_2d(py, px, c, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!sp->forward || !sp->backward) throw std::runtime_error("FFTW could not plan the Riesz convolution");
  // Wrap negative offsets around the torus; the padding row/column stays zero.
  for (int dj = -(dom.ny - 1); dj < dom.ny; ++dj) {
    int jj = dj < 0 ? dj + py : dj;
    for (int di = -(dom.nx - 1); di < dom.nx; ++di) {
      int ii = di < 0 ? di + px : di;
      real[static_cast<std::size_t>(jj) * px + ii] = weight(di, dj);
    }
  }
  fftw_execute_dft_r2c(sp->forward, real.data(), reinterpret_cast<fftw_complex*>(sp->w_hat.data()));
  spectrum_ = std::move(sp);
}

GridFunction RieszKernel::apply_direct(const GridFunction& g) const {
  if (!(g.dom == dom_)) throw std::invalid_argument("grid function does not match the kernel domain");
  const int nx = dom_.nx, ny = dom_.ny, tx = table_nx();
  GridFunction out(dom_);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      for (int jj = 0; jj < ny; ++jj) {
        // Row of weights for dj = j - jj, indexed so that di = i - ii.
        const double* wrow = &table_[(j - jj + ny - 1) * tx + (i + nx - 1)];
        const double* grow = &g.values[static_cast<std::size_t>(jj) * nx];
        for (int ii = 0; ii < nx; ++ii) s += wrow[-ii] * grow[ii];
      }
      out.at(i, j) = s;
    }
  }
  return out;
}

GridFunction RieszKernel::apply_fft(const GridFunction& g) const {
  if (!(g.dom == dom_)) throw std::invalid_argument("grid function does not match the kernel domain");
  const Spectrum& sp = *spectrum_;
  const int nx = dom_.nx, ny = dom_.ny, px = sp.px, py = sp.py;
  std::vector<double> real(static_cast<std::size_t>(px) * py, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) real[static_cast<std::size_t>(j) * px + i] = g.at(i, j);
  std::vector<std::complex<double>> hat(sp.w_hat.size());
  auto* c = reinterpret_cast<fftw_complex*>(hat.data());
  fftw_execute_dft_r2c(sp.forward, real.data(), c);
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= sp.w_hat[k];
  fftw_execute_dft_c2r(sp.backward, c, real.data());
  const double scale = 1.0 / (static_cast<double>(px) * py);
  GridFunction out(dom_);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out.at(i, j) = real[static_cast<std::size_t>(j) * px + i] * scale;
  return out;
}

double hls_quotient(const RieszKernel& k, const GridFunction& f, const GridFunction& g) {
  const double r = hls_exponent(k.mu());
  double nf = lp_norm(f, r), ng = lp_norm(g, r);
  if (nf == 0.0 && ng == 0.0) throw std::invalid_argument("hls_quotient: f and g are both zero");
  if (nf == 0.0 || ng == 0.0) return 0.0;
  return l2_inner(k.apply_direct(f), g) / (nf * ng);
}

double hls_quotient(const GridFunction& f, const GridFunction& g, double mu) {
  return hls_quotient(RieszKernel(f.dom, mu), f, g);
}

double riesz_holder_bound(const RieszKernel& k, double r0) {
  if (!(r0 > 1.0 && r0 * k.mu() < 1.0)) throw std::invalid_argument("riesz_holder_bound needs 1 < r0 < 1/mu");
  const Domain& d = k.domain();
  const double area = d.cell_area();
  const int tx = k.table_nx(), ty = k.table_ny();
  // Summed-area table of (w/area)^{r0}·area so every node's window sum is O(1).
  std::vector<double> S(static_cast<std::size_t>(tx + 1) * (ty + 1), 0.0);
  auto at = [&](int i, int j) -> double& { return S[static_cast<std::size_t>(j) * (tx + 1) + i]; };
  for (int j = 0; j < ty; ++j)
    for (int i = 0; i < tx; ++i)
      at(i + 1, j + 1) = std::pow(k.table()[static_cast<std::size_t>(j) * tx + i] / area, r0) * area +
                         at(i, j + 1) + at(i + 1, j) - at(i, j);
  double best = 0.0;
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      // Offsets i - ii for ii in [0, nx) map to table columns [i, i + nx).
      int i0 = i, i1 = i + d.nx, j0 = j, j1 = j + d.ny;
      double s = at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
      best = std::max(best, s);
    }
  }
  return std::pow(best, 1.0 / r0);
}

}  // namespace choquard
