#pragma once

#include <memory>
#include <string>
#include <vector>

#include <choquard/grid.hpp>

namespace choquard {

enum class RieszBackend { direct, fft };

std::string to_string(RieszBackend b);
/// Accepts "direct" or "fft"; throws std::invalid_argument otherwise.
RieszBackend parse_backend(const std::string& s);

/// ∫∫ |ζ|^{-μ} dζ over the cell [-hx/2, hx/2] x [-hy/2, hy/2], by adaptive
/// polar quadrature to relative rel_tol.
double singular_cell_weight(double hx, double hy, double mu, double rel_tol = 1e-12);

/// Discrete Riesz kernel: weights w(di, dj) for offsets |di| < nx, |dj| < ny,
/// already multiplied by the cell area so that (Kg)_i = Σ_j w(i - j) g_j.
class RieszKernel {
 public:
  /// Throws std::invalid_argument unless 0 < mu < 1.
  RieszKernel(const Domain& dom, double mu);

  const Domain& domain() const noexcept { return dom_; }
  double mu() const noexcept { return mu_; }
  int table_nx() const noexcept { return 2 * dom_.nx - 1; }
  int table_ny() const noexcept { return 2 * dom_.ny - 1; }
  double weight(int di, int dj) const { return table_[(dj + dom_.ny - 1) * table_nx() + (di + dom_.nx - 1)]; }
  const std::vector<double>& table() const noexcept { return table_; }

  GridFunction apply_direct(const GridFunction& g) const;
  GridFunction apply_fft(const GridFunction& g) const;
  GridFunction apply(const GridFunction& g, RieszBackend b) const {
    return b == RieszBackend::fft ? apply_fft(g) : apply_direct(g);
  }

 private:
  struct Spectrum;

  Domain dom_;
  double mu_;
  std::vector<double> table_;
  std::shared_ptr<const Spectrum> spectrum_;
};

inline RieszKernel kernel_build(const Domain& dom, double mu) { return RieszKernel(dom, mu); }
inline GridFunction riesz_apply_direct(const RieszKernel& k, const GridFunction& g) { return k.apply_direct(g); }
inline GridFunction riesz_apply_fft(const RieszKernel& k, const GridFunction& g) { return k.apply_fft(g); }

/// Exponent r = s = 4/(4 - μ) of the diagonal HLS inequality.
inline double hls_exponent(double mu) { return 4.0 / (4.0 - mu); }

/// ⟨K f, g⟩ / (|f|_r |g|_r), r = 4/(4-μ), direct backend. Returns 0 when one
/// factor vanishes; throws std::invalid_argument when both do.
double hls_quotient(const GridFunction& f, const GridFunction& g, double mu);
double hls_quotient(const RieszKernel& k, const GridFunction& f, const GridFunction& g);

/// Hölder bound M with sup|Kg| <= M |g|_{s0}, s0 = r0/(r0-1), for 1 < r0 < 1/μ.
double riesz_holder_bound(const RieszKernel& k, double r0);

}  // namespace choquard
