#pragma once

// Mild-solution integrator for the perturbation equation
//     v_t + d_x(v^2/2 + u_phi v) + I[v] - v_xx = 0
// and for the full equation  u_t + d_x(u^2/2) + I[u] - u_xx = 0.
//
// Each step restarts the Duhamel formula from the current field. With
// E = exp(-h psi), z = -h psi and the flux potential P(w) = w^2/2 + u_phi w,
//
//   v_{n+1} = E v_n - 2 pi i xi h [ (phi1 - phi2) P(v_n)(t) + phi2 P(w)(t + h) ],
//   phi1 = (e^z - 1)/z,  phi2 = (e^z - 1 - z)/z^2,
//
// which integrates the linear interpolant of the flux exactly against the
// kernel. w = v_{n+1} is found by Picard iteration seeded with E v_n.

#include "fowler/diagnostics.hpp"
#include "fowler/grid.hpp"
#include "fowler/kernel.hpp"
#include "fowler/profile.hpp"
#include "fowler/symbol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace fowler {

class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PicardError : public NumericalFault {
 public:
  PicardError(const std::string& what, double ratio) : NumericalFault(what), last_ratio(ratio) {}
  double last_ratio;
};

struct KernelFitSpec {
  double t_min = 1e-4;
  double t_max = 1.0;
  std::size_t samples = 25;
};

struct SimConfig {
  Grid grid{1024, 40.0};
  WaveProfile profile;
  InitialSpec v0;
  double t_end = 1.0;
  double dt = 1e-3;
  double picard_tol = 1e-12;
  int picard_max = 50;
  bool dealias = true;
  std::size_t output_stride = 10;
  bool linear_only = false;  // test hook: drop the whole flux
  bool substep = true;
  KernelFitSpec fit;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("time.dt must be > 0");
    if (!(t_end >= dt)) throw std::invalid_argument("time.t_end must be >= time.dt");
    const double steps = std::round(t_end / dt);
    if (std::abs(steps * dt - t_end) > 1e-9 * t_end)
      throw std::invalid_argument("time.t_end must be a whole number of time.dt steps");
    if (!(picard_tol > 0.0 && picard_tol <= 1e-2))
      throw std::invalid_argument("time.picard_tol must be in (0, 1e-2]");
    if (picard_max < 1) throw std::invalid_argument("time.picard_max must be >= 1");
    if (output_stride < 1) throw std::invalid_argument("output.stride must be >= 1");
    if (!(fit.t_min > 0.0 && fit.t_min < fit.t_max))
      throw std::invalid_argument("output.norm_t_min must be > 0 and below output.norm_t_max");
    if (fit.samples < 2) throw std::invalid_argument("output.norm_samples must be >= 2");
    profile.validate();
  }
};

/// Kernel constants K0, K1 on a grid of the configured length that resolves
/// the smallest sampled time. Memoized per (L, t_min, t_max, samples).
inline KernelNormFit kernel_constants(double length, const KernelFitSpec& spec) {
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, KernelNormFit> cache;
  const Key key{std::bit_cast<std::uint64_t>(length), std::bit_cast<std::uint64_t>(spec.t_min),
                std::bit_cast<std::uint64_t>(spec.t_max), spec.samples};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const Grid g = resolving_grid(length, spec.t_min);
  KernelNormFit fit = grad_kernel_norms(log_spaced_times(spec.t_min, spec.t_max, spec.samples), g);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(fit)).first->second;
}

struct ContractionBound {
  double M = 0.0;
  double K0 = 0.0;
  double K1 = 0.0;
  double u_phi_norm = 0.0;
  double t_star = 0.0;

  /// 2 M K0 t^{1/4} + 2 K1 t^{1/2} u, the Lipschitz constant of the Duhamel map.
  double lipschitz(double t) const {
    return 2.0 * M * K0 * std::pow(t, 0.25) + 2.0 * K1 * std::sqrt(t) * u_phi_norm;
  }
  double residual() const { return lipschitz(t_star) - 1.0; }
};

/// Root of 2 M K0 t^{1/4} + 2 K1 t^{1/2} u = 1. With x = t^{1/4} this is a
/// quadratic; the root is taken in the cancellation-free form
/// x = 2 / (2 M K0 + sqrt(4 M^2 K0^2 + 8 K1 u)).
inline ContractionBound contraction_time_bound(double M, double K0, double K1, double u_phi_norm) {
  if (!(M >= 0.0) || !(K0 >= 0.0) || !(K1 >= 0.0) || !(u_phi_norm >= 0.0))
    throw std::invalid_argument("contraction bound inputs must be non-negative");
  const double p = 2.0 * M * K0;
  const double q = 2.0 * K1 * u_phi_norm;
  if (p == 0.0 && q == 0.0)
    throw std::invalid_argument("contraction bound undefined: M K0 and K1 u are both zero");
  const double x = 2.0 / (p + std::sqrt(p * p + 4.0 * q));
  const double x2 = x * x;
  return {M, K0, K1, u_phi_norm, x2 * x2};
}

inline ContractionBound contraction_time_bound(double M, const KernelNormFit& fit,
                                               double u_phi_norm) {
  return contraction_time_bound(M, fit.K0, fit.K1, u_phi_norm);
}

namespace detail {

/// (e^z - 1)/z and (e^z - 1 - z)/z^2, by Taylor series for |z| < 1.
inline std::pair<cplx, cplx> phi_functions(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx p1 = 0.0, p2 = 0.0, zk = 1.0;
    double f1 = 1.0, f2 = 2.0;  // (k+1)!, (k+2)!
    for (int k = 0; k < 25; ++k) {
      p1 += zk / f1;
      p2 += zk / f2;
      zk *= z;
      f1 *= static_cast<double>(k + 2);
      f2 *= static_cast<double>(k + 3);
    }
    return {p1, p2};
  }
  const cplx ez = std::exp(z);
  return {(ez - 1.0) / z, (ez - 1.0 - z) / (z * z)};
}

inline bool all_finite(const SpectralField& F) {
  for (const cplx& c : F.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

/// Replace c(k), c(-k) by their Hermitian average.
inline void hermitian_project(SpectralField& F) {
  const std::size_t n = F.size();
  F[0] = F[0].real();
  F[n / 2] = F[n / 2].real();
  for (std::size_t i = 1; i < n / 2; ++i) {
    const cplx a = 0.5 * (F[i] + std::conj(F[n - i]));
    F[i] = a;
    F[n - i] = std::conj(a);
  }
}

}  // namespace detail

enum class FluxForm { perturbation, full };

/// Spectrum of d_x(v^2/2 + u_phi v), with 2/3-rule products when dealiased.
inline SpectralField flux_potential_spectrum(const SpectralField& V, const RealField* u_phi,
                                             bool dealias) {
  const Grid& g = V.grid();
  const long kmax = g.dealias_cutoff();
  const RealField v = inverse_transform(dealias ? truncate(V, kmax) : V);
  std::vector<double> p(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    p[j] = 0.5 * v[j] * v[j];
    if (u_phi) p[j] += (*u_phi)[j] * v[j];
  }
  SpectralField P = forward_transform(RealField(g, std::move(p)));
  return dealias ? truncate(std::move(P), kmax) : P;
}

inline RealField nonlinear_flux(const RealField& v, const RealField& u_phi, bool dealias) {
  require_same_grid(v.grid(), u_phi.grid());
  const Grid& g = v.grid();
  RealField u = u_phi;
  if (dealias) u = inverse_transform(truncate(forward_transform(u_phi), g.dealias_cutoff()));
  return inverse_transform(
      spectral_derivative(flux_potential_spectrum(forward_transform(v), &u, dealias), 1));
}

struct StepResult {
  SpectralField v;
  int iterations = 0;
  double ratio = 0.0;      // largest d_m / d_{m-1} above the noise floor
  double distance = 0.0;   // last successive-iterate distance
};

class DuhamelStepper {
 public:
  DuhamelStepper(const SimConfig& cfg, FluxForm form)
      : cfg_(cfg), form_(form), table_(std::make_shared<SymbolTable>(cfg.grid)) {}

  const SymbolTable& table() const { return *table_; }
  const SimConfig& config() const { return cfg_; }

  /// u_phi(t) as used in products: truncated to the dealiased band when
  /// dealiasing is on.
  RealField profile_field(double t) const {
    RealField u = cfg_.profile.field(cfg_.grid, t);
    if (cfg_.dealias)
      u = inverse_transform(truncate(forward_transform(u), cfg_.grid.dealias_cutoff()));
    return u;
  }

  StepResult step(const SpectralField& V, double t_now, double h) const {
    require_same_grid(V.grid(), cfg_.grid);
    const Coefficients& c = coefficients(h);
    const std::size_t n = cfg_.grid.n();
    SpectralField linear(cfg_.grid);
    for (std::size_t i = 0; i < n; ++i) linear[i] = (*c.E)[i] * V[i];
    StepResult r{linear, 0, 0.0, 0.0};
    if (cfg_.linear_only) return r;

    std::optional<RealField> u0, u1;
    if (form_ == FluxForm::perturbation) {
      u0 = profile_field(t_now);
      u1 = profile_field(t_now + h);
    }
    const SpectralField P0 = flux_potential_spectrum(V, u0 ? &*u0 : nullptr, cfg_.dealias);
    SpectralField base = linear;
    for (std::size_t i = 0; i < n; ++i) base[i] += c.A[i] * P0[i];

    SpectralField w = linear;
    double prev = 0.0;
    for (int m = 0; m < cfg_.picard_max; ++m) {
      const SpectralField P1 = flux_potential_spectrum(w, u1 ? &*u1 : nullptr, cfg_.dealias);
      SpectralField next = base;
      for (std::size_t i = 0; i < n; ++i) next[i] += c.B[i] * P1[i];
      if (!detail::all_finite(next))
        throw NumericalFault("non-finite Picard iterate at t=" + std::to_string(t_now));
      const double d = spectral_l2_norm(next - w);
      const double scale = std::max(1.0, spectral_l2_norm(next));
      const double floor = 1e3 * std::numeric_limits<double>::epsilon() * scale;
      if (m > 0 && prev > floor) r.ratio = std::max(r.ratio, d / prev);
      prev = d;
      w = std::move(next);
      r.iterations = m + 1;
      r.distance = d;
      if (d <= cfg_.picard_tol * scale) {
        detail::hermitian_project(w);
        r.v = std::move(w);
        return r;
      }
    }
    throw PicardError("Picard iteration did not converge in " + std::to_string(cfg_.picard_max) +
                          " iterations at t=" + std::to_string(t_now) +
                          " (last contraction ratio " + std::to_string(r.ratio) + ")",
                      r.ratio);
  }

 private:
  struct Coefficients {
    std::shared_ptr<const std::vector<cplx>> E;
    std::vector<cplx> A;  // multiplies P(t_now)
    std::vector<cplx> B;  // multiplies P(t_now + h)
  };

  const Coefficients& coefficients(double h) const {
    const auto key = std::bit_cast<std::uint64_t>(h);
    std::lock_guard lock(mutex_);
    if (auto it = coeffs_.find(key); it != coeffs_.end()) return it->second;
    const Grid& g = cfg_.grid;
    Coefficients c;
    c.E = table_->propagator(h);
    c.A.resize(g.n());
    c.B.resize(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
      if (i == g.nyquist_index() || i == 0) continue;  // d_x vanishes on both
      const auto [p1, p2] = detail::phi_functions(-h * table_->psi(i));
      const cplx dx(0.0, 2.0 * pi * g.xi(i));
      c.A[i] = -h * dx * (p1 - p2);
      c.B[i] = -h * dx * p2;
    }
    return coeffs_.emplace(key, std::move(c)).first->second;
  }

  SimConfig cfg_;
  FluxForm form_;
  std::shared_ptr<SymbolTable> table_;
  mutable std::mutex mutex_;
  mutable std::map<std::uint64_t, Coefficients> coeffs_;
};

/// One Duhamel step of size dt from t_now, without sub-stepping.
inline RealField duhamel_step(const RealField& v, double t_now, double dt, const SimConfig& cfg) {
  const DuhamelStepper stepper(cfg, FluxForm::perturbation);
  return inverse_transform(stepper.step(forward_transform(v), t_now, dt).v);
}

namespace detail {

inline Trajectory run(const SimConfig& cfg, FluxForm form, const RealField& start,
                      double t_start) {
  cfg.validate();
  require_same_grid(start.grid(), cfg.grid);
  const Grid& g = cfg.grid;
  const DuhamelStepper stepper(cfg, form);

  // Energy bound and blow-up guard act on the deviation from u_phi(t).
  auto deviation = [&](const RealField& f, double t) {
    return form == FluxForm::full ? f - cfg.profile.field(g, t) : f;
  };
  const RealField d0 = deviation(start, t_start);
  const EnergyBoundParams bound = energy_params(cfg.profile, g, d0);
  const double u_norm = c1b_norm(cfg.profile, g);
  const double c_phi = 0.5 * u_norm;

  std::optional<KernelNormFit> fit;
  if (cfg.substep && !cfg.linear_only) fit = kernel_constants(g.length(), cfg.fit);

  Trajectory traj;
  SpectralField V = forward_transform(start);
  const double mass0 = V[0].real();

  auto record = [&](double t, const RealField& f, int iters, double ratio, int subs) {
    const RealField d = deviation(f, t);
    DiagnosticsRecord rec;
    rec.t = t;
    rec.l2 = l2_norm(d);
    rec.energy_bound = bound.bound(t - t_start);
    rec.mass = field_mass(f);
    rec.mass_drift = std::abs(rec.mass - mass0);
    rec.picard_iters = iters;
    rec.picard_ratio = ratio;
    rec.spectral_tail = spectral_decay_report(f).tail;
    rec.substeps = subs;
    traj.times.push_back(t);
    traj.fields.push_back(f);
    traj.records.push_back(rec);
  };
  record(t_start, start, 0, 0.0, 1);

  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  int iters_acc = 0, subs_acc = 1;
  double ratio_acc = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t0 = t_start + static_cast<double>(i) * cfg.dt;
    const double t1 = t_start + static_cast<double>(i + 1) * cfg.dt;
    const double h = t1 - t0;

    int sub = 1;
    if (fit) {
      const double M = 2.0 * std::exp((bound.alpha0 + c_phi) * h) * spectral_l2_norm(V);
      double ts = cfg.fit.t_max;
      if (M > 0.0 || u_norm > 0.0)
        ts = std::min(ts, contraction_time_bound(M, *fit, u_norm).t_star);
      traj.min_t_star = std::min(traj.min_t_star, ts);
      if (h > ts) {
        if (h / ts > 1e5)
          throw NumericalFault("contraction time " + std::to_string(ts) +
                               " would need more than 1e5 sub-steps");
        sub = static_cast<int>(std::ceil(h / ts));
      }
    }
    for (int s = 0; s < sub; ++s) {
      const double ta = t0 + h * static_cast<double>(s) / sub;
      const double tb = (s + 1 == sub) ? t1 : t0 + h * static_cast<double>(s + 1) / sub;
      StepResult r = stepper.step(V, ta, tb - ta);
      V = std::move(r.v);
      iters_acc = std::max(iters_acc, r.iterations);
      ratio_acc = std::max(ratio_acc, r.ratio);
      traj.max_picard_iters = std::max(traj.max_picard_iters, r.iterations);
      traj.max_picard_ratio = std::max(traj.max_picard_ratio, r.ratio);
    }
    subs_acc = std::max(subs_acc, sub);
    traj.max_substeps = std::max(traj.max_substeps, sub);
    ++traj.steps;

    const RealField f = inverse_transform(V);
    const double norm = l2_norm(deviation(f, t1));
    const double guard =
        1e6 * std::max(bound.bound(t1 - t_start), 1e-12 * std::max(1.0, l2_norm(start)));
    if (!std::isfinite(norm) || norm > guard)
      throw NumericalFault("blow-up guard tripped at t=" + std::to_string(t1) + ": ||v|| = " +
                           std::to_string(norm) + " exceeds 1e6 x energy bound");
    if ((i + 1) % cfg.output_stride == 0 || i + 1 == steps) {
      record(t1, f, iters_acc, ratio_acc, subs_acc);
      iters_acc = 0;
      ratio_acc = 0.0;
      subs_acc = 1;
    }
  }
  return traj;
}

}  // namespace detail

/// Perturbation equation from v0 at t = 0.
inline Trajectory evolve(const SimConfig& cfg) {
  return detail::run(cfg, FluxForm::perturbation, make_initial(cfg.v0, cfg.grid), 0.0);
}

/// Perturbation equation restarted from v_start at t_start, for cfg.t_end more time.
inline Trajectory evolve(const SimConfig& cfg, const RealField& v_start, double t_start) {
  return detail::run(cfg, FluxForm::perturbation, v_start, t_start);
}

/// Full equation from u0 = u_phi(0) + v0.
inline Trajectory evolve_full(const SimConfig& cfg) {
  const RealField u0 = cfg.profile.field(cfg.grid, 0.0) + make_initial(cfg.v0, cfg.grid);
  return detail::run(cfg, FluxForm::full, u0, 0.0);
}

inline Trajectory evolve_full(const SimConfig& cfg, const RealField& u_start, double t_start) {
  return detail::run(cfg, FluxForm::full, u_start, t_start);
}

}  // namespace fowler
