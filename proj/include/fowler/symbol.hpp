#pragma once

// Fourier symbol of I - d^2/dx^2,
//
//   psi(xi) = 4 pi^2 xi^2 - a |xi|^{4/3} + i b xi |xi|^{1/3},
//
// with the coefficients read off the Fourier form of the nonlocal term
// I[f](x) = int_0^inf s^{-1/3} f''(x - s) ds,
//   F(I[f])(xi) = Gamma(2/3) (2 pi i xi)^{4/3} F f(xi)
//               = Gamma(2/3) (2 pi)^{4/3} |xi|^{4/3} (-1/2 + i sqrt(3)/2 sgn xi) F f(xi),
// i.e. a = (2 pi)^{4/3} Gamma(2/3) / 2 and b = sqrt(3) a.

#include "fowler/grid.hpp"
#include "fowler/quadrature.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

namespace fowler {

struct SymbolCoefficients {
  double a_I;
  double b_I;
  double gamma_two_thirds;
};

inline const SymbolCoefficients& symbol_coefficients() {
  static const SymbolCoefficients c = [] {
    const double g = gamma_two_thirds();
    const double a = 0.5 * std::pow(2.0 * pi, 4.0 / 3.0) * g;
    return SymbolCoefficients{a, std::sqrt(3.0) * a, g};
  }();
  return c;
}

/// Multiplier of the nonlocal term alone: psi(xi) - 4 pi^2 xi^2.
inline cplx nonlocal_multiplier(double xi) {
  const auto& c = symbol_coefficients();
  const double ax = std::abs(xi);
  const double cbrt = std::cbrt(ax);
  return {-c.a_I * ax * cbrt, c.b_I * xi * cbrt};
}

inline cplx psi_symbol(double xi) {
  return nonlocal_multiplier(xi) + cplx(4.0 * pi * pi * xi * xi, 0.0);
}

/// Frequencies where Re psi < 0 (excluding xi = 0).
struct UnstableBand {
  double xi_c;     // positive root of Re psi
  double xi_star;  // argmin of Re psi
  double alpha0;   // -min Re psi
};

inline UnstableBand unstable_band() {
  const double a = symbol_coefficients().a_I;
  const double four_pi2 = 4.0 * pi * pi;
  const double xi_c = std::pow(a / four_pi2, 1.5);
  // d/dxi Re psi = 8 pi^2 xi - (4/3) a xi^{1/3} vanishes at xi^{2/3} = a / (6 pi^2).
  const double r = a / (6.0 * pi * pi);
  const double xi_star = std::pow(r, 1.5);
  // Re psi(xi_star) = r^2 (4 pi^2 r - a) = -a r^2 / 3.
  const double alpha0 = a * r * r / 3.0;
  return {xi_c, xi_star, alpha0};
}

/// psi on the grid frequencies plus a memo of exp(-tau psi) keyed by the exact
/// bits of tau. The memo is safe for concurrent readers; an insert computes
/// outside the lock and keeps whichever entry lands first.
class SymbolTable {
 public:
  explicit SymbolTable(Grid grid) : grid_(grid), psi_(grid.n()) {
    for (std::size_t i = 0; i < grid.n(); ++i) psi_[i] = psi_symbol(grid.xi(i));
    psi_[0] = 0.0;
    psi_[grid.nyquist_index()] = psi_[grid.nyquist_index()].real();
  }

  const Grid& grid() const { return grid_; }
  std::span<const cplx> psi() const { return psi_; }
  cplx psi(std::size_t i) const { return psi_[i]; }

  /// exp(-tau psi_k) for every storage index k.
  std::shared_ptr<const std::vector<cplx>> propagator(double tau) const {
    const auto key = std::bit_cast<std::uint64_t>(tau);
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto values = std::make_shared<std::vector<cplx>>(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i) (*values)[i] = std::exp(-tau * psi_[i]);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(values));
    return it->second;
  }

  std::size_t cached_count() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
  }

 private:
  Grid grid_;
  std::vector<cplx> psi_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const std::vector<cplx>>> cache_;
};

/// Pointwise product of a spectrum with a table of multipliers.
inline SpectralField multiply(SpectralField F, std::span<const cplx> m) {
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= m[i];
  return F;
}

}  // namespace fowler
