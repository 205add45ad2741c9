#pragma once

// The nonlocal operator I evaluated two ways:
//
//  * Fourier route: multiply F f by -a |xi|^{4/3} + i b xi |xi|^{1/3};
//  * integral route: I[f](x) = 4/9 int_{-inf}^0 (f(x+z) - f(x) - f'(x) z) / |z|^{7/3} dz,
//    discretized on [-Z, -delta] with graded Gauss-Legendre panels.
//
// On [-delta, 0) the integrand is replaced by its Taylor limit f''(x)/2 |z|^{-1/3},
// contributing f''(x) delta^{2/3} / 3. Beyond -Z the local counterterms
// -f(x) - f'(x) z are integrated exactly and f(x+z) is replaced by the mean of
// the periodic field.

#include "fowler/grid.hpp"
#include "fowler/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fowler {

struct QuadratureSpec {
  double z_max = 20.0;
  double z_min = 1e-4;
  std::size_t panels = 256;
  std::size_t order = 8;

  static QuadratureSpec defaults_for(const Grid& g) {
    QuadratureSpec q;
    q.z_max = 0.5 * g.length();
    return q;
  }

  void validate(const Grid& g) const {
    if (!(z_min > 0.0)) throw std::invalid_argument("quadrature.z_min must be > 0");
    if (!(z_min < z_max))
      throw std::invalid_argument("quadrature.z_min must be smaller than quadrature.z_max");
    if (z_max > 0.5 * g.length() * (1.0 + 1e-12))
      throw std::invalid_argument("quadrature.z_max must not exceed half the domain length");
    if (panels < 16) throw std::invalid_argument("quadrature.panels must be >= 16");
    if (order < 1) throw std::invalid_argument("quadrature.order must be >= 1");
  }
};

/// Panel breakpoints in u = |z| on [delta, Z]: a quarter of the panels are
/// geometric on [delta, min(1, Z)], the rest uniform up to Z.
inline std::vector<double> nonlocal_panel_breaks(const QuadratureSpec& q) {
  const double split = std::clamp(1.0, q.z_min, q.z_max);
  std::size_t geometric = split > q.z_min ? q.panels / 4 : 0;
  if (split >= q.z_max) geometric = q.panels;
  const std::size_t uniform = q.panels - geometric;
  std::vector<double> br;
  br.reserve(q.panels + 1);
  for (std::size_t i = 0; i < geometric; ++i)
    br.push_back(q.z_min * std::pow(split / q.z_min,
                                    static_cast<double>(i) / static_cast<double>(geometric)));
  for (std::size_t i = 0; i < uniform; ++i)
    br.push_back(split + (q.z_max - split) * static_cast<double>(i) / static_cast<double>(uniform));
  br.push_back(geometric == q.panels ? split : q.z_max);
  return br;
}

/// Fraction of the peak coefficient magnitude found in the top third (|k| > n/3).
inline double top_third_peak_ratio(const SpectralField& F) {
  const Grid& g = F.grid();
  double peak = 0.0, top = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double m = std::abs(F[i]);
    peak = std::max(peak, m);
    if (std::labs(g.wavenumber(i)) > g.dealias_cutoff()) top = std::max(top, m);
  }
  return peak > 0.0 ? top / peak : 0.0;
}

struct FourierEvaluation {
  RealField field;
  double imag_residual;  // max |Im| / max |Re| of the raw inverse transform
  bool band_limited;     // top-third spectrum below 1e-8 of the peak
};

inline FourierEvaluation apply_nonlocal_fourier_checked(const RealField& f) {
  const SpectralField F = forward_transform(f);
  const SpectralField G = apply_multiplier(F, nonlocal_multiplier);
  const auto raw = inverse_transform_complex(G);
  double re = 0.0, im = 0.0;
  for (const cplx& z : raw) {
    re = std::max(re, std::abs(z.real()));
    im = std::max(im, std::abs(z.imag()));
  }
  return {inverse_transform(G), re > 0.0 ? im / re : im, top_third_peak_ratio(F) <= 1e-8};
}

inline RealField apply_nonlocal_fourier(const RealField& f) {
  return apply_nonlocal_fourier_checked(f).field;
}

inline RealField apply_nonlocal_integral(const RealField& f, const QuadratureSpec& q) {
  const Grid& g = f.grid();
  q.validate(g);
  const std::size_t n = g.n();
  const SpectralField F = forward_transform(f);
  const RealField d1 = inverse_transform(spectral_derivative(F, 1));
  const RealField d2 = inverse_transform(spectral_derivative(F, 2));

  std::vector<double> acc(n, 0.0);
  const auto breaks = nonlocal_panel_breaks(q);
  const QuadratureRule& rule = gauss_legendre(q.order);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
    const double half = 0.5 * (breaks[p + 1] - breaks[p]);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double u = mid + half * rule.nodes[k];
      const double z = -u;
      const double w = half * rule.weights[k] / (u * u * std::cbrt(u));
      const RealField shifted = inverse_transform(shift_spectrum(F, z));
      for (std::size_t j = 0; j < n; ++j) acc[j] += w * (shifted[j] - f[j] - d1[j] * z);
    }
  }

  const double Z = q.z_max;
  const double far_const = 0.75 / (Z * std::cbrt(Z));  // int_Z^inf u^{-7/3} du
  const double far_lin = 3.0 / std::cbrt(Z);           // int_Z^inf u^{-4/3} du
  const double mean = F[0].real() / g.length();
  const double inner = std::cbrt(q.z_min * q.z_min) / 3.0;
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double far = (mean - f[j]) * far_const + d1[j] * far_lin;
    out[j] = (4.0 / 9.0) * (acc[j] + far) + inner * d2[j];
  }
  return RealField(g, std::move(out));
}

/// Discrete H^s norm (sum_k (1 + xi_k^2)^s |c_k|^2 / L)^{1/2}.
inline double sobolev_norm(const SpectralField& F, double s) {
  const Grid& g = F.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double xi = g.xi(i);
    sum += std::pow(1.0 + xi * xi, s) * std::norm(F[i]);
  }
  return std::sqrt(sum / g.length());
}

inline double sobolev_norm(const RealField& f, double s) {
  return sobolev_norm(forward_transform(f), s);
}

/// Modulus coefficient of the multiplier, |m(xi)| = C |xi|^{4/3} with
/// C = (2 pi)^{4/3} Gamma(2/3) = 2 a. It bounds I: H^s -> H^{s-4/3} and is
/// sharp as the spectrum moves to high frequency.
inline double nonlocal_sobolev_constant() { return 2.0 * symbol_coefficients().a_I; }

/// max |f| over |x| >= Z relative to max |f|.
inline double far_field_ratio(const RealField& f, double z_max) {
  const Grid& g = f.grid();
  const double peak = f.max_abs();
  if (peak == 0.0) return 0.0;
  const double reach = std::min(z_max, 0.5 * g.length()) - 0.5 * g.dx();
  double m = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j)
    if (std::abs(g.x(j)) >= reach) m = std::max(m, std::abs(f[j]));
  return m / peak;
}

}  // namespace fowler
