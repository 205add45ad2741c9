#pragma once

// Uniform periodic grid on [-L/2, L/2) and the transform pair
//
//   F f(xi_k)  = dx * sum_j exp(-2 pi i x_j xi_k) f(x_j),     xi_k = k / L,
//   f(x_j)     = (1/L) * sum_k exp(+2 pi i x_j xi_k) F f(xi_k),
//
// so that discrete coefficients approximate the continuous transform
// int exp(-2 pi i x xi) f(x) dx directly. Coefficients are stored in FFT
// order (k = 0, 1, ..., n/2-1, -n/2, ..., -1). The Nyquist mode k = -n/2 has
// no partner; real-valued multipliers act on it through their real part.

#include "fowler/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fowler {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

class Grid {
 public:
  Grid(std::size_t n, double length) : n_(n), length_(length) {
    if (n % 2 != 0) throw std::invalid_argument("n must be even");
    if (n < 8) throw std::invalid_argument("n must be at least 8");
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("length must be positive");
    dx_ = length_ / static_cast<double>(n_);
  }

  std::size_t n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return dx_; }

  /// Sample point x_j = -L/2 + j dx.
  double x(std::size_t j) const { return -0.5 * length_ + static_cast<double>(j) * dx_; }

  /// Integer wavenumber stored at FFT-order index i.
  long wavenumber(std::size_t i) const {
    const auto half = static_cast<long>(n_ / 2);
    const auto k = static_cast<long>(i);
    return k < half ? k : k - static_cast<long>(n_);
  }
  std::size_t index_of(long k) const {
    const auto half = static_cast<long>(n_ / 2);
    if (k < -half || k >= half) throw std::out_of_range("wavenumber outside [-n/2, n/2)");
    return static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long>(n_));
  }
  std::size_t nyquist_index() const { return n_ / 2; }

  /// Frequency in cycles per unit length at storage index i.
  double xi(std::size_t i) const { return static_cast<double>(wavenumber(i)) / length_; }
  double nyquist_xi() const { return 0.5 * static_cast<double>(n_) / length_; }

  /// Largest |k| kept by the 2/3 dealiasing rule.
  long dealias_cutoff() const { return static_cast<long>(n_ / 3); }

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  std::size_t n_;
  double length_;
  double dx_;
};

inline Grid make_grid(std::size_t n, double length) { return Grid(n, length); }

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("fields live on different grids");
}

class RealField {
 public:
  explicit RealField(Grid grid) : grid_(grid), values_(grid.n(), 0.0) {}
  RealField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n())
      throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                  " samples, grid has " + std::to_string(grid_.n()));
    for (double v : values_)
      if (!std::isfinite(v)) throw std::domain_error("field contains non-finite samples");
  }

  /// Samples f(x_j).
  template <typename F>
  static RealField sample(Grid grid, F&& f) {
    std::vector<double> v(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) v[j] = f(grid.x(j));
    return RealField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  RealField& operator+=(const RealField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  RealField& operator-=(const RealField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  RealField& operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
  }
  friend RealField operator+(RealField a, const RealField& b) { return a += b; }
  friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
  friend RealField operator*(double s, RealField a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

class SpectralField {
 public:
  explicit SpectralField(Grid grid) : grid_(grid), coeffs_(grid.n(), cplx{}) {}
  SpectralField(Grid grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.n())
      throw std::invalid_argument("spectrum size does not match grid");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }

  /// Storage-order access.
  cplx operator[](std::size_t i) const { return coeffs_[i]; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }

  /// Access by signed wavenumber k in [-n/2, n/2).
  cplx at(long k) const { return coeffs_[grid_.index_of(k)]; }
  cplx& at(long k) { return coeffs_[grid_.index_of(k)]; }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(cplx s) {
    for (cplx& c : coeffs_) c *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Largest violation of c(-k) = conj(c(k)), including the imaginary parts of
  /// the self-conjugate modes k = 0 and k = -n/2.
  double hermitian_defect() const {
    const std::size_t n = coeffs_.size();
    double d = std::max(std::abs(coeffs_[0].imag()), std::abs(coeffs_[n / 2].imag()));
    for (std::size_t i = 1; i < n / 2; ++i)
      d = std::max(d, std::abs(coeffs_[i] - std::conj(coeffs_[n - i])));
    return d;
  }

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

inline SpectralField forward_transform(const RealField& f) {
  const Grid& g = f.grid();
  const std::size_t n = g.n();
  std::vector<cplx> in(n), out(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = f[j];
  fft::transform(in, out, fft::Direction::forward);
  // exp(-2 pi i x_0 xi_k) = (-1)^k for x_0 = -L/2.
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = (g.wavenumber(i) % 2 == 0) ? 1.0 : -1.0;
    out[i] *= sign * g.dx();
  }
  return SpectralField(g, std::move(out));
}

/// Inverse transform without any realness assumption.
inline std::vector<cplx> inverse_transform_complex(const SpectralField& F) {
  const Grid& g = F.grid();
  const std::size_t n = g.n();
  std::vector<cplx> in(n), out(n);
  const double scale = 1.0 / g.length();
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = (g.wavenumber(i) % 2 == 0) ? 1.0 : -1.0;
    in[i] = F[i] * (sign * scale);
  }
  fft::transform(in, out, fft::Direction::backward);
  return out;
}

inline constexpr double hermitian_tolerance = 1e-10;

/// Inverse transform to a real field. A spectrum whose Hermitian defect
/// exceeds 1e-10 of its largest coefficient is rejected.
inline RealField inverse_transform(const SpectralField& F) {
  const double scale = F.max_abs();
  if (F.hermitian_defect() > hermitian_tolerance * scale)
    throw std::domain_error("spectrum is not Hermitian; refusing real inverse transform");
  auto z = inverse_transform_complex(F);
  std::vector<double> v(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) v[j] = z[j].real();
  return RealField(F.grid(), std::move(v));
}

/// Multiply every coefficient by m(xi_k). The Nyquist coefficient is scaled by
/// Re m(xi_N) so that Hermitian multipliers map real fields to real fields.
template <typename Multiplier>
SpectralField apply_multiplier(SpectralField F, Multiplier&& m) {
  const Grid g = F.grid();
  const std::size_t ny = g.nyquist_index();
  for (std::size_t i = 0; i < g.n(); ++i) {
    const cplx factor = m(g.xi(i));
    F[i] *= (i == ny) ? cplx(factor.real(), 0.0) : factor;
  }
  return F;
}

/// Multiplication by (2 pi i xi)^order.
inline SpectralField spectral_derivative(const SpectralField& F, int order) {
  if (order < 1) throw std::invalid_argument("derivative order must be positive");
  return apply_multiplier(F, [order](double xi) {
    return std::pow(cplx(0.0, 2.0 * pi * xi), order);
  });
}

inline RealField derivative(const RealField& f, int order) {
  return inverse_transform(spectral_derivative(forward_transform(f), order));
}

/// Samples of f(x + a), by trigonometric interpolation.
inline SpectralField shift_spectrum(const SpectralField& F, double a) {
  return apply_multiplier(F, [a](double xi) { return std::polar(1.0, 2.0 * pi * xi * a); });
}

/// Zero every mode with |k| > kmax.
inline SpectralField truncate(SpectralField F, long kmax) {
  const Grid& g = F.grid();
  for (std::size_t i = 0; i < g.n(); ++i)
    if (std::labs(g.wavenumber(i)) > kmax) F[i] = 0.0;
  return F;
}

/// (1/L sum_k |c_k|^2)^{1/2}; equals the discrete L2 norm by Parseval.
inline double spectral_l2_norm(const SpectralField& F) {
  double s = 0.0;
  for (const cplx& c : F.coeffs()) s += std::norm(c);
  return std::sqrt(s / F.grid().length());
}

/// Evaluate the trigonometric interpolant of a real field at an arbitrary x.
inline double interpolate(const SpectralField& F, double x) {
  const Grid& g = F.grid();
  const std::size_t half = g.n() / 2;
  double sum = F[0].real();
  const double theta = 2.0 * pi * x / g.length();
  cplx rot = std::polar(1.0, theta);
  cplx phase = rot;
  for (std::size_t k = 1; k < half; ++k) {
    if (k % 32 == 0) phase = std::polar(1.0, theta * static_cast<double>(k));
    sum += 2.0 * (F[k] * phase).real();
    phase *= rot;
  }
  sum += F[half].real() * std::cos(theta * static_cast<double>(half));
  return sum / g.length();
}

}  // namespace fowler
