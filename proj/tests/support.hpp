#pragma once

// Test-side oracles. Nothing here calls into the library's numerics; values
// are computed from std:: special functions, long-double sums, bisection and
// golden-section search.

#include "fowler/grid.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Gamma(2/3) by the substitution t = e^s and the trapezoid rule in s, which
/// converges double-exponentially for this integrand.
inline double gamma_two_thirds_trapezoid() {
  long double sum = 0.0L;
  const long double h = 1e-3L;
  for (long double s = -80.0L; s <= 6.0L; s += h)
    sum += std::exp((2.0L / 3.0L) * s - std::exp(s));
  return static_cast<double>(sum * h);
}

/// a = (2 pi)^{4/3} Gamma(2/3) / 2 from std::tgamma.
inline double a_coefficient() { return 0.5 * std::pow(2.0 * pi, 4.0 / 3.0) * std::tgamma(2.0 / 3.0); }
inline double b_coefficient() { return std::sqrt(3.0) * a_coefficient(); }

inline std::complex<double> psi(double xi) {
  const double ax = std::abs(xi);
  return {4.0 * pi * pi * xi * xi - a_coefficient() * std::pow(ax, 4.0 / 3.0),
          b_coefficient() * xi * std::pow(ax, 1.0 / 3.0)};
}

inline std::complex<double> nonlocal_multiplier(double xi) {
  return psi(xi) - 4.0 * pi * pi * xi * xi;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < iters; ++i) {
    if (f(c) < f(d)) b = d;
    else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

/// Composite Simpson rule in long double.
inline long double simpson(const std::function<long double(long double)>& f, long double a,
                           long double b, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const long double h = (b - a) / static_cast<long double>(intervals);
  long double s = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i)
    s += f(a + h * static_cast<long double>(i)) * ((i % 2) ? 4.0L : 2.0L);
  return s * h / 3.0L;
}

/// Direct O(n^2) evaluation of dx * sum_j exp(-2 pi i x_j xi_k) f_j in long double,
/// returned in FFT order.
inline std::vector<std::complex<double>> direct_transform(const fowler::Grid& g,
                                                          const std::vector<double>& f) {
  const std::size_t n = g.n();
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long k = g.wavenumber(i);
    long double re = 0.0L, im = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double x = -0.5L * g.length() + static_cast<long double>(j) * g.length() / n;
      const long double ang = -2.0L * std::numbers::pi_v<long double> * x * k / g.length();
      re += std::cos(ang) * f[j];
      im += std::sin(ang) * f[j];
    }
    const long double dx = static_cast<long double>(g.length()) / n;
    out[i] = {static_cast<double>(re * dx), static_cast<double>(im * dx)};
  }
  return out;
}

/// Random real field whose spectrum is confined to 1 <= |k| <= kmax, with
/// coefficients scaled by an exp(-(k/kmax)^2) envelope. Seeded.
inline fowler::RealField random_band_limited(const fowler::Grid& g, long kmax, std::uint64_t seed,
                                             bool keep_mean = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> amp(kmax + 1), ph(kmax + 1);
  for (long k = 0; k <= kmax; ++k) {
    const double env = std::exp(-std::pow(static_cast<double>(k) / kmax, 2));
    amp[k] = env * nd(rng);
    ph[k] = 2.0 * pi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  const double mean = keep_mean ? nd(rng) : 0.0;
  std::vector<double> v(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    double s = mean;
    for (long k = 1; k <= kmax; ++k)
      s += amp[k] * std::cos(2.0 * pi * k * x / g.length() + ph[k]);
    v[j] = s;
  }
  return fowler::RealField(g, std::move(v));
}

/// Localized random field: a random band-limited field times a Gaussian
/// window, so that it decays well inside the box.
inline fowler::RealField random_localized(const fowler::Grid& g, std::uint64_t seed,
                                          double width = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  const int terms = 6;
  std::vector<double> a(terms), w(terms), c(terms);
  for (int i = 0; i < terms; ++i) {
    a[i] = nd(rng);
    w[i] = 0.5 + std::abs(nd(rng));
    c[i] = ud(rng);
  }
  std::vector<double> v(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    double s = 0.0;
    for (int i = 0; i < terms; ++i) s += a[i] * std::cos(w[i] * x + c[i]);
    v[j] = s * std::exp(-x * x / (width * width));
  }
  return fowler::RealField(g, std::move(v));
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (long double)(a[i] - b[i]) * (a[i] - b[i]);
    den += (long double)b[i] * b[i];
  }
  return static_cast<double>(std::sqrt(num / den));
}

inline std::vector<double> values(const fowler::RealField& f) {
  return {f.values().begin(), f.values().end()};
}

}  // namespace oracle
