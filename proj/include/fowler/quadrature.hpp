#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fowler {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [-1, 1] (Newton on P_n).
inline QuadratureRule compute_gauss_legendre(std::size_t order) {
  if (order < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

inline const QuadratureRule& gauss_legendre(std::size_t order) {
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

/// Composite Gauss-Legendre over the panels [breaks[i], breaks[i+1]].
template <typename F>
double integrate_panels(F&& f, const std::vector<double>& breaks, std::size_t order) {
  const QuadratureRule& rule = gauss_legendre(order);
  double sum = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
    const double half = 0.5 * (breaks[p + 1] - breaks[p]);
    double panel = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      panel += rule.weights[q] * f(mid + half * rule.nodes[q]);
    sum += half * panel;
  }
  return sum;
}

inline std::vector<double> uniform_breaks(double a, double b, std::size_t panels) {
  std::vector<double> br(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    br[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
  br.back() = b;
  return br;
}

/// Gamma(2/3) = int_0^inf t^{-1/3} e^{-t} dt. The substitution t = u^3 turns
/// it into 3 int_0^inf u e^{-u^3} du, whose integrand is smooth and below
/// 1e-90 beyond u = 6.
inline double gamma_two_thirds() {
  static const double value = [] {
    return 3.0 * integrate_panels([](double u) { return u * std::exp(-u * u * u); },
                                  uniform_breaks(0.0, 6.0, 48), 20);
  }();
  return value;
}

/// Reference value of Gamma(2/3), 12 significant digits.
inline constexpr double gamma_two_thirds_reference = 1.35411793943;

}  // namespace fowler
