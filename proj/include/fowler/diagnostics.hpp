#pragma once

// Norms, the L2 energy bound e^{(alpha0 + C_phi) t} ||v0||, linear growth
// rates and spectral tail reports.

#include "fowler/grid.hpp"
#include "fowler/profile.hpp"
#include "fowler/symbol.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fowler {

/// sqrt(dx * sum f^2).
inline double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().dx());
}

/// Discrete mass dx * sum f, i.e. the zero coefficient F f(0).
inline double field_mass(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.grid().dx();
}

struct DiagnosticsRecord {
  double t = 0.0;
  double l2 = 0.0;
  double energy_bound = 0.0;
  double mass = 0.0;
  double mass_drift = 0.0;
  int picard_iters = 0;
  double picard_ratio = 0.0;
  double spectral_tail = 0.0;
  int substeps = 1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<RealField> fields;
  std::vector<DiagnosticsRecord> records;

  std::size_t steps = 0;
  int max_substeps = 1;
  double min_t_star = std::numeric_limits<double>::infinity();
  double max_picard_ratio = 0.0;
  int max_picard_iters = 0;
};

struct EnergyBoundParams {
  double alpha0 = 0.0;
  double c_phi = 0.0;
  double v0_norm = 0.0;

  double bound(double t) const { return std::exp((alpha0 + c_phi) * t) * v0_norm; }
};

inline EnergyBoundParams energy_params(const WaveProfile& p, const Grid& g, const RealField& v0) {
  return {unstable_band().alpha0, 0.5 * c1b_norm(p, g), l2_norm(v0)};
}

inline constexpr double energy_bound_tolerance = 1e-8;

struct EnergyReport {
  std::vector<double> margins;  // bound - l2 per record
  bool pass = true;
  std::optional<std::size_t> first_violation;
  double worst_ratio = 0.0;  // max l2 / bound (0 when the bound is 0 and l2 is 0)
};

/// Checks ||v(t)|| <= bound(t) (1 + 1e-8) at every stored field. Norms are
/// recomputed from the fields, not taken from the records.
inline EnergyReport energy_bound_check(const Trajectory& traj, const EnergyBoundParams& p) {
  if (traj.fields.empty()) throw std::invalid_argument("empty trajectory");
  EnergyReport r;
  for (std::size_t i = 0; i < traj.fields.size(); ++i) {
    const double b = p.bound(traj.times[i]);
    const double l2 = l2_norm(traj.fields[i]);
    r.margins.push_back(b - l2);
    if (b > 0.0) r.worst_ratio = std::max(r.worst_ratio, l2 / b);
    else if (l2 > 0.0) r.worst_ratio = std::numeric_limits<double>::infinity();
    if (l2 > b * (1.0 + energy_bound_tolerance) && r.pass) {
      r.pass = false;
      r.first_violation = i;
    }
  }
  return r;
}

/// Mass drift allowance: 1e-12 per unit time, with at least one unit.
inline double mass_drift_allowance(double t) { return 1e-12 * std::max(t, 1.0); }

struct MassReport {
  bool pass = true;
  double worst_drift = 0.0;
  std::optional<std::size_t> first_violation;
};

inline MassReport mass_check(const Trajectory& traj) {
  MassReport r;
  if (traj.fields.empty()) return r;
  const double m0 = field_mass(traj.fields.front());
  for (std::size_t i = 0; i < traj.fields.size(); ++i) {
    const double drift = std::abs(field_mass(traj.fields[i]) - m0);
    r.worst_drift = std::max(r.worst_drift, drift);
    if (drift > mass_drift_allowance(traj.times[i]) && r.pass) {
      r.pass = false;
      r.first_violation = i;
    }
  }
  return r;
}

/// Growth rate -Re psi(xi) of a Fourier mode under the linear flow.
inline double linear_growth_report(double xi) { return -psi_symbol(xi).real(); }

struct SpectralDecay {
  std::array<double, 3> thirds{};  // L2 energy fraction for |k| in [0,n/6], (n/6,n/3], (n/3,n/2]
  double tail = 0.0;               // = thirds[2]
};

inline SpectralDecay spectral_decay_report(const SpectralField& F) {
  const Grid& g = F.grid();
  const long n = static_cast<long>(g.n());
  SpectralDecay r;
  double total = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const long k = std::labs(g.wavenumber(i));
    const double e = std::norm(F[i]);
    total += e;
    const int band = (6 * k <= n) ? 0 : (3 * k <= n ? 1 : 2);
    r.thirds[static_cast<std::size_t>(band)] += e;
  }
  if (total > 0.0)
    for (double& v : r.thirds) v /= total;
  r.tail = r.thirds[2];
  return r;
}

inline SpectralDecay spectral_decay_report(const RealField& f) {
  return spectral_decay_report(forward_transform(f));
}

struct TailTrend {
  bool monotone = true;
  std::optional<std::size_t> first_increase;
};

/// Whether a sequence of tail fractions is non-increasing, up to a relative
/// slack and an absolute floor of 1e-28 for roundoff.
inline TailTrend tail_trend(const std::vector<double>& tails, double slack = 1e-9) {
  TailTrend r;
  for (std::size_t i = 1; i < tails.size(); ++i)
    if (tails[i] > tails[i - 1] * (1.0 + slack) + 1e-28) {
      r.monotone = false;
      r.first_increase = i;
      break;
    }
  return r;
}

}  // namespace fowler
