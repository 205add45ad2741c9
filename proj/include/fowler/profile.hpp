#pragma once

// Travelling-wave profiles u_phi(t, x) = phi(x - c t) and initial perturbations.
//
// The tanh front is periodized with a matching back front at x = +-L/2,
//   phi(y) = A (tanh(y/w) - tanh((y - L/2)/w) - tanh((y + L/2)/w)),
// so that it is smooth on the circle. The back front has slope -A/w.

#include "fowler/grid.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fowler {

/// y wrapped into [-L/2, L/2).
inline double wrap_periodic(double y, double length) {
  double r = std::fmod(y + 0.5 * length, length);
  if (r < 0.0) r += length;
  return r - 0.5 * length;
}

/// Zero-padded spectrum on a grid m times finer. The Nyquist coefficient is
/// split evenly between +-n/2.
inline SpectralField zero_pad(const SpectralField& F, std::size_t factor) {
  const Grid& g = F.grid();
  const Grid fine(g.n() * factor, g.length());
  SpectralField out(fine);
  const long half = static_cast<long>(g.n() / 2);
  for (long k = -half + 1; k < half; ++k) out.at(k) = F.at(k);
  if (factor > 1) {
    const double ny = F.at(-half).real();
    out.at(-half) = 0.5 * ny;
    out.at(half) = 0.5 * ny;
  } else {
    out.at(-half) = F.at(-half);
  }
  return out;
}

enum class ProfileKind { constant, tanh_front, gaussian_bump, sampled };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::constant: return "constant";
    case ProfileKind::tanh_front: return "tanh";
    case ProfileKind::gaussian_bump: return "gaussian";
    case ProfileKind::sampled: return "sampled";
  }
  return "?";
}

struct WaveProfile {
  ProfileKind kind = ProfileKind::constant;
  double amplitude = 0.0;
  double width = 1.0;
  double offset = 0.0;
  double speed = 0.0;
  std::optional<RealField> samples;

  static WaveProfile constant(double value) {
    WaveProfile p;
    p.amplitude = value;
    return p;
  }
  static WaveProfile tanh_front(double A, double w, double c = 0.0, double offset = 0.0) {
    WaveProfile p;
    p.kind = ProfileKind::tanh_front;
    p.amplitude = A;
    p.width = w;
    p.speed = c;
    p.offset = offset;
    return p;
  }
  static WaveProfile gaussian_bump(double A, double w, double c = 0.0, double offset = 0.0) {
    WaveProfile p;
    p.kind = ProfileKind::gaussian_bump;
    p.amplitude = A;
    p.width = w;
    p.speed = c;
    p.offset = offset;
    return p;
  }
  static WaveProfile sampled(RealField f, double c = 0.0) {
    WaveProfile p;
    p.kind = ProfileKind::sampled;
    p.speed = c;
    p.samples = std::move(f);
    return p;
  }

  void validate() const {
    if (!std::isfinite(amplitude) || !std::isfinite(offset) || !std::isfinite(speed))
      throw std::invalid_argument("profile parameters must be finite");
    if ((kind == ProfileKind::tanh_front || kind == ProfileKind::gaussian_bump) &&
        !(width > 0.0))
      throw std::invalid_argument("profile.width must be > 0");
    if (kind == ProfileKind::sampled && !samples)
      throw std::invalid_argument("sampled profile has no samples");
  }

  /// d^order/dx^order phi at x for an analytic kind (order 0..2), period L.
  double analytic(double x, double L, int order) const {
    const double A = amplitude;
    switch (kind) {
      case ProfileKind::constant:
        return order == 0 ? A : 0.0;
      case ProfileKind::tanh_front: {
        const double y = wrap_periodic(x - offset, L);
        double s = 0.0;
        const double centres[3] = {0.0, 0.5 * L, -0.5 * L};
        const double signs[3] = {1.0, -1.0, -1.0};
        for (int i = 0; i < 3; ++i) {
          const double u = (y - centres[i]) / width;
          const double th = std::tanh(u);
          const double sech2 = 1.0 - th * th;
          double v = th;
          if (order == 1) v = sech2 / width;
          if (order == 2) v = -2.0 * sech2 * th / (width * width);
          s += signs[i] * v;
        }
        return A * s;
      }
      case ProfileKind::gaussian_bump: {
        const double y = wrap_periodic(x - offset, L);
        const double w2 = width * width;
        const double g = A * std::exp(-y * y / w2);
        if (order == 0) return g;
        if (order == 1) return -2.0 * y / w2 * g;
        return (4.0 * y * y / (w2 * w2) - 2.0 / w2) * g;
      }
      case ProfileKind::sampled:
        break;
    }
    throw std::logic_error("analytic evaluation of a sampled profile");
  }

  /// d^order/dx^order u_phi(t, .) on the grid, order 0..2.
  RealField field(const Grid& g, double t, int order = 0) const {
    if (kind == ProfileKind::sampled) {
      require_same_grid(samples->grid(), g);
      SpectralField F = forward_transform(*samples);
      if (speed * t != 0.0) F = shift_spectrum(F, -speed * t);
      if (order > 0) F = spectral_derivative(F, order);
      return inverse_transform(F);
    }
    const double shift = speed * t;
    return RealField::sample(g, [&](double x) { return analytic(x - shift, g.length(), order); });
  }
};

/// sup |phi^{(order)}| over a 16x oversampled grid.
inline double profile_sup(const WaveProfile& p, const Grid& g, int order) {
  constexpr std::size_t over = 16;
  const Grid fine(g.n() * over, g.length());
  if (p.kind == ProfileKind::sampled) {
    require_same_grid(p.samples->grid(), g);
    SpectralField F = zero_pad(forward_transform(*p.samples), over);
    if (order > 0) F = spectral_derivative(F, order);
    return inverse_transform(F).max_abs();
  }
  double m = 0.0;
  for (std::size_t j = 0; j < fine.n(); ++j)
    m = std::max(m, std::abs(p.analytic(fine.x(j), g.length(), order)));
  return m;
}

/// sup|phi| + sup|phi'|.
inline double c1b_norm(const WaveProfile& p, const Grid& g) {
  return profile_sup(p, g, 0) + profile_sup(p, g, 1);
}

/// sup|phi| + sup|phi'| + sup|phi''|.
inline double c2b_norm(const WaveProfile& p, const Grid& g) {
  return c1b_norm(p, g) + profile_sup(p, g, 2);
}

enum class InitialKind { zero, constant, gaussian, mode, noise, file };

struct InitialSpec {
  InitialKind kind = InitialKind::zero;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  long mode = 1;
  std::uint64_t seed = 1;
  std::string path = {};
};

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::zero: return "zero";
    case InitialKind::constant: return "constant";
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::mode: return "mode";
    case InitialKind::noise: return "noise";
    case InitialKind::file: return "file";
  }
  return "?";
}

/// Whitespace-separated samples; '#' starts a comment.
inline std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open sample file '" + path + "'");
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw std::invalid_argument("sample file '" + path + "': bad number '" + tok + "'");
      v.push_back(d);
    }
  }
  return v;
}

inline RealField make_initial(const InitialSpec& s, const Grid& g) {
  switch (s.kind) {
    case InitialKind::zero:
      return RealField(g);
    case InitialKind::constant:
      return RealField::sample(g, [&](double) { return s.amplitude; });
    case InitialKind::gaussian:
      return RealField::sample(g, [&](double x) {
        const double y = wrap_periodic(x - s.center, g.length()) / s.width;
        return s.amplitude * std::exp(-pi * y * y);
      });
    case InitialKind::mode:
      return RealField::sample(g, [&](double x) {
        return s.amplitude * std::cos(2.0 * pi * static_cast<double>(s.mode) * x / g.length());
      });
    case InitialKind::noise: {
      std::mt19937_64 rng(s.seed);
      std::normal_distribution<double> dist(0.0, 1.0);
      std::vector<double> v(g.n());
      for (double& x : v) x = s.amplitude * dist(rng);
      return RealField(g, std::move(v));
    }
    case InitialKind::file: {
      auto v = read_samples(s.path);
      if (v.size() != g.n())
        throw std::invalid_argument("sample file '" + s.path + "' has " +
                                    std::to_string(v.size()) + " values, grid.n is " +
                                    std::to_string(g.n()));
      return RealField(g, std::move(v));
    }
  }
  throw std::logic_error("unknown initial kind");
}

}  // namespace fowler
