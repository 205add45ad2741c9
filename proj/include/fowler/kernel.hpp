#pragma once

// Semigroup kernel K(t, .) = F^{-1}(exp(-t psi)) of I - d^2/dx^2 and the
// diagnostics that go with it: convolution action, the semigroup residual
// computed in physical space, and the gradient norms ||d_x K(t)||_{L^2},
// ||d_x K(t)||_{L^1} with their fitted constants.

#include "fowler/grid.hpp"
#include "fowler/symbol.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fowler {

struct KernelSnapshot {
  double t;
  RealField field;
  double mass;           // dx * sum K
  double imag_residual;  // max |Im| / max |Re| before taking the real part
};

inline SpectralField kernel_spectrum(double t, const SymbolTable& table) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel time must be > 0");
  const auto m = table.propagator(t);
  return SpectralField(table.grid(), *m);
}

inline KernelSnapshot kernel_field(double t, const SymbolTable& table) {
  const SpectralField spec = kernel_spectrum(t, table);
  const auto raw = inverse_transform_complex(spec);
  double re = 0.0, im = 0.0;
  for (const cplx& z : raw) {
    re = std::max(re, std::abs(z.real()));
    im = std::max(im, std::abs(z.imag()));
  }
  RealField field = inverse_transform(spec);
  const Grid& g = table.grid();
  double mass = 0.0;
  for (double v : field.values()) mass += v;
  mass *= g.dx();
  return {t, std::move(field), mass, re > 0.0 ? im / re : im};
}

inline KernelSnapshot kernel_field(double t, const Grid& grid) {
  return kernel_field(t, SymbolTable(grid));
}

inline RealField convolve_kernel(double t, const RealField& f, const SymbolTable& table) {
  require_same_grid(f.grid(), table.grid());
  return inverse_transform(multiply(forward_transform(f), *table.propagator(t)));
}

inline RealField convolve_kernel(double t, const RealField& f) {
  return convolve_kernel(t, f, SymbolTable(f.grid()));
}

/// Periodic convolution dx * sum_m a(x_m) b(x_j - x_m), summed directly.
inline RealField circular_convolution(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  const std::size_t n = g.n();
  const std::size_t half = n / 2;
  std::vector<double> out(n, 0.0);
  // x_j - x_m sits at grid index (j - m + n/2) mod n.
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += a[m] * b[(j + half + n - m) % n];
    out[j] = s * g.dx();
  }
  return RealField(g, std::move(out));
}

/// ||K(s) * K(t) - K(s+t)||_{L^2} / ||K(s+t)||_{L^2}, with the convolution
/// done in physical space.
inline double semigroup_residual(double s, double t, const SymbolTable& table) {
  if (!(s > 0.0) || !(t > 0.0)) throw std::invalid_argument("semigroup times must be > 0");
  const RealField ks = kernel_field(s, table).field;
  const RealField kt = kernel_field(t, table).field;
  const RealField kst = kernel_field(s + t, table).field;
  const RealField conv = circular_convolution(ks, kt);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < conv.size(); ++j) {
    num += (conv[j] - kst[j]) * (conv[j] - kst[j]);
    den += kst[j] * kst[j];
  }
  return std::sqrt(num / den);
}

inline double semigroup_residual(double s, double t, const Grid& grid) {
  return semigroup_residual(s, t, SymbolTable(grid));
}

/// int |f'| over one period for the real field with spectrum F, i.e. the
/// total variation of f. Extrema are located between samples on the
/// trigonometric interpolant of f' and f is evaluated there, so the result is
/// spectrally accurate for resolved fields.
inline double total_variation(const SpectralField& F) {
  const Grid& g = F.grid();
  const std::size_t n = g.n();
  const SpectralField dF = spectral_derivative(F, 1);
  const RealField f = inverse_transform(F);
  const RealField d = inverse_transform(dF);
  const double dmax = d.max_abs();
  if (dmax == 0.0) return 0.0;
  const double significant = 1e-12 * dmax;

  std::vector<double> extrema;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jn = (j + 1) % n;
    const bool up0 = d[j] >= 0.0;
    const bool up1 = d[jn] >= 0.0;
    if (up0 == up1) continue;
    const double grid_value = up0 ? std::max(f[j], f[jn]) : std::min(f[j], f[jn]);
    if (std::max(std::abs(d[j]), std::abs(d[jn])) < significant) {
      extrema.push_back(grid_value);
      continue;
    }
    const double a = g.x(j);
    const double b = a + g.dx();
    auto deriv = [&](double x) { return interpolate(dF, x); };
    const double fa = deriv(a), fb = deriv(b);
    if (fa * fb > 0.0) {
      extrema.push_back(grid_value);
      continue;
    }
    std::uintmax_t iters = 80;
    const auto bracket = boost::math::tools::toms748_solve(
        deriv, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(48), iters);
    const double root = 0.5 * (bracket.first + bracket.second);
    const double value = interpolate(F, root);
    extrema.push_back(up0 ? std::max(value, grid_value) : std::min(value, grid_value));
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < extrema.size(); ++i)
    tv += std::abs(extrema[(i + 1) % extrema.size()] - extrema[i]);
  return tv;
}

/// |exp(-t psi(xi_N))| <= 1e-12: the kernel spectrum has decayed at Nyquist.
inline bool kernel_resolved(double t, const Grid& grid) {
  return std::exp(-t * psi_symbol(grid.nyquist_xi()).real()) <= 1e-12;
}

/// Smallest power-of-two grid of the given length resolving K(t_min).
inline Grid resolving_grid(double length, double t_min, std::size_t n_min = 1024) {
  std::size_t n = 8;
  while (n < n_min || !kernel_resolved(t_min, Grid(n, length))) {
    n *= 2;
    if (n > (std::size_t{1} << 24)) throw std::invalid_argument("t_min too small to resolve");
  }
  return Grid(n, length);
}

/// Least-squares slope of log(value) against log(t) over samples in [lo, hi].
inline double loglog_slope(const std::vector<double>& t, const std::vector<double>& v,
                           double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo * (1 - 1e-9) || t[i] > hi * (1 + 1e-9)) continue;
    const double x = std::log(t[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double md = static_cast<double>(m);
  return (md * sxy - sx * sy) / (md * sxx - sx * sx);
}

struct KernelNormFit {
  std::vector<double> times;
  std::vector<double> l1_grad;
  std::vector<double> l2_grad;
  double K0 = 0.0;
  double K1 = 0.0;
  double slope_l2 = 0.0;
  double slope_l1 = 0.0;
  double slope_window_lo = 0.0;
  double slope_window_hi = 0.0;
};

/// Gradient norms of K over the sampled times. K0 = max t^{3/4} ||d_x K||_{L^2},
/// K1 = max t^{1/2} ||d_x K||_{L^1}; slopes are fitted over the two decades
/// starting at the smallest sampled time.
inline KernelNormFit grad_kernel_norms(std::vector<double> t_samples, const SymbolTable& table) {
  if (t_samples.empty()) throw std::invalid_argument("no kernel sample times");
  std::sort(t_samples.begin(), t_samples.end());
  for (double t : t_samples)
    if (!(t > 0.0)) throw std::invalid_argument("kernel sample times must be > 0");
  const Grid& g = table.grid();
  if (!kernel_resolved(t_samples.front(), g))
    throw std::invalid_argument("grid n=" + std::to_string(g.n()) +
                                " does not resolve the kernel at t=" +
                                std::to_string(t_samples.front()) +
                                " (Nyquist symbol above 1e-12)");
  KernelNormFit fit;
  fit.times = t_samples;
  for (double t : t_samples) {
    const SpectralField spec = kernel_spectrum(t, table);
    const double l2 = spectral_l2_norm(spectral_derivative(spec, 1));
    const double l1 = total_variation(spec);
    fit.l2_grad.push_back(l2);
    fit.l1_grad.push_back(l1);
    fit.K0 = std::max(fit.K0, std::pow(t, 0.75) * l2);
    fit.K1 = std::max(fit.K1, std::sqrt(t) * l1);
  }
  fit.slope_window_lo = t_samples.front();
  fit.slope_window_hi = 100.0 * t_samples.front();
  fit.slope_l2 = loglog_slope(fit.times, fit.l2_grad, fit.slope_window_lo, fit.slope_window_hi);
  fit.slope_l1 = loglog_slope(fit.times, fit.l1_grad, fit.slope_window_lo, fit.slope_window_hi);
  return fit;
}

inline KernelNormFit grad_kernel_norms(std::vector<double> t_samples, const Grid& grid) {
  return grad_kernel_norms(std::move(t_samples), SymbolTable(grid));
}

/// max/min - 1 of t^p * values over the first decade of sampled times. A
/// small value means the scaled norm has settled as t -> 0, i.e. stays bounded.
inline double small_time_variation(const std::vector<double>& t, const std::vector<double>& v,
                                   double p) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 10.0 * t.front() * (1 + 1e-9)) continue;
    const double s = std::pow(t[i], p) * v[i];
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return lo > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::infinity();
}

/// m log-spaced times from t_lo to t_hi inclusive.
inline std::vector<double> log_spaced_times(double t_lo, double t_hi, std::size_t m) {
  if (m < 2) return {t_lo};
  std::vector<double> t(m);
  const double r = std::log(t_hi / t_lo);
  for (std::size_t i = 0; i < m; ++i)
    t[i] = t_lo * std::exp(r * static_cast<double>(i) / static_cast<double>(m - 1));
  t.front() = t_lo;
  t.back() = t_hi;
  return t;
}

}  // namespace fowler
