#include "fowler/diagnostics.hpp"
#include "fowler/evolution.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace fowler;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("L2 norm and mass examples") {
  const Grid g(1024, 40.0);
  const auto c = RealField::sample(g, [](double) { return 2.0; });
  CHECK_THAT(l2_norm(c), WithinRel(2.0 * std::sqrt(40.0), 1e-14));
  CHECK_THAT(field_mass(c), WithinRel(80.0, 1e-14));

  // ||exp(-pi x^2)||_2 = 2^{-1/4}
  const auto gs = RealField::sample(g, [](double x) { return std::exp(-oracle::pi * x * x); });
  const long double simpson =
      oracle::simpson([](long double x) { return std::exp(-2.0L * std::numbers::pi_v<long double> * x * x); },
                      -20.0L, 20.0L, 20000);
  CHECK_THAT(static_cast<double>(std::sqrt(simpson)), WithinRel(std::pow(2.0, -0.25), 1e-13));
  CHECK_THAT(l2_norm(gs), WithinRel(std::pow(2.0, -0.25), 1e-13));
  CHECK_THAT(field_mass(gs), WithinRel(1.0, 1e-13));
  CHECK(l2_norm(RealField(g)) == 0.0);
}

TEST_CASE("profile sup norms") {
  const Grid g(512, 40.0);
  CHECK(c1b_norm(WaveProfile::constant(0.5), g) == 0.5);
  CHECK(c1b_norm(WaveProfile::constant(-0.5), g) == 0.5);
  // tanh: sup = A, sup of derivative = A / w
  CHECK_THAT(c1b_norm(WaveProfile::tanh_front(1.5, 1.0), g), WithinRel(1.5 + 1.5, 1e-5));
  // wider fronts feel the periodic wrap
  CHECK(c1b_norm(WaveProfile::tanh_front(1.5, 2.0), g) < 1.5 + 0.75);
  // Gaussian: sup |phi'| = A sqrt(2) / (w sqrt(e))
  const double A = 0.8, w = 1.3;
  CHECK_THAT(c1b_norm(WaveProfile::gaussian_bump(A, w), g),
             WithinRel(A + A * std::sqrt(2.0) / (w * std::exp(0.5)), 1e-5));
  // phi'' of a Gaussian peaks at the centre, 2 A / w^2
  CHECK_THAT(profile_sup(WaveProfile::gaussian_bump(A, w), g, 2), WithinRel(2.0 * A / (w * w), 1e-10));

  // sampled profiles are subadditive
  const auto f1 = oracle::random_band_limited(g, 10, 1);
  const auto f2 = oracle::random_band_limited(g, 10, 2);
  const double n12 = c1b_norm(WaveProfile::sampled(f1 + f2), g);
  CHECK(n12 <= c1b_norm(WaveProfile::sampled(f1), g) + c1b_norm(WaveProfile::sampled(f2), g));
  CHECK(n12 >= (f1 + f2).max_abs());
}

TEST_CASE("energy bound check") {
  SimConfig c;
  c.grid = Grid(256, 40.0);
  c.profile = WaveProfile::tanh_front(1.0, 1.0);
  c.v0 = InitialSpec{.kind = InitialKind::gaussian, .amplitude = 0.2};
  c.t_end = 0.2;
  c.dt = 1e-2;
  c.output_stride = 2;
  const auto tr = evolve(c);
  const auto p = energy_params(c.profile, c.grid, tr.fields.front());
  CHECK(p.alpha0 == unstable_band().alpha0);
  CHECK_THAT(p.c_phi, WithinRel(1.0, 1e-5));
  const auto ok = energy_bound_check(tr, p);
  CHECK(ok.pass);
  CHECK_FALSE(ok.first_violation);
  for (double m : ok.margins) CHECK(m >= -1e-8 * p.v0_norm);

  // the bound itself grows monotonically
  double prev = 0.0;
  for (double t = 0.0; t <= 2.0; t += 0.1) {
    CHECK(p.bound(t) >= prev);
    prev = p.bound(t);
  }

  // scaling the fields by 10 past t = 0 violates the unscaled bound
  Trajectory scaled = tr;
  for (std::size_t i = 1; i < scaled.fields.size(); ++i) scaled.fields[i] = 10.0 * scaled.fields[i];
  const auto bad = energy_bound_check(scaled, p);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.first_violation);
  CHECK(*bad.first_violation == 1);
  CHECK(bad.worst_ratio > 5.0);

  // zero trajectory against a zero bound
  SimConfig z = c;
  z.v0.kind = InitialKind::zero;
  const auto tz = evolve(z);
  const auto rz = energy_bound_check(tz, energy_params(z.profile, z.grid, tz.fields.front()));
  CHECK(rz.pass);
  CHECK(rz.worst_ratio == 0.0);
}

TEST_CASE("mass check") {
  const Grid g(64, 8.0);
  Trajectory tr;
  tr.times = {0.0, 1.0, 2.0};
  const auto f = oracle::random_band_limited(g, 5, 4, true);
  tr.fields = {f, f, f};
  CHECK(mass_check(tr).pass);
  tr.fields[2] = f + RealField::sample(g, [](double) { return 1e-10; });
  const auto r = mass_check(tr);
  CHECK_FALSE(r.pass);
  CHECK(r.first_violation == std::size_t{2});
  CHECK_THAT(r.worst_drift, WithinRel(8e-10, 1e-4));
  CHECK(mass_drift_allowance(0.5) == 1e-12);
  CHECK(mass_drift_allowance(3.0) == 3e-12);
}

TEST_CASE("linear growth report") {
  const auto band = unstable_band();
  CHECK_THAT(linear_growth_report(band.xi_star), WithinRel(band.alpha0, 1e-12));
  CHECK_THAT(linear_growth_report(band.xi_c), WithinAbs(0.0, 1e-14));
  CHECK(linear_growth_report(2.0 * band.xi_c) < 0.0);
  CHECK(linear_growth_report(0.0) == 0.0);
  for (double xi : {0.01, 0.04, 0.3}) CHECK(linear_growth_report(xi) == linear_growth_report(-xi));
}

TEST_CASE("spectral decay report") {
  const Grid g(384, 40.0);
  const auto low = oracle::random_band_limited(g, 60, 9, true);
  const auto r = spectral_decay_report(low);
  CHECK(r.tail < 1e-28);
  CHECK(r.thirds[1] < 1e-28);
  CHECK_THAT(r.thirds[0] + r.thirds[1] + r.thirds[2], WithinRel(1.0, 1e-14));

  // white noise fills every band; the linear flow removes the top third quickly
  const auto noise = make_initial(InitialSpec{.kind = InitialKind::noise, .amplitude = 1.0}, g);
  const auto rn = spectral_decay_report(noise);
  CHECK(rn.tail > 0.2);
  const SymbolTable table(g);
  CHECK(spectral_decay_report(convolve_kernel(0.1, noise, table)).tail < 1e-6);

  std::vector<double> tails;
  for (double t : {0.0, 1e-3, 1e-2, 0.05, 0.1}) {
    const auto f = t == 0.0 ? noise : convolve_kernel(t, noise, table);
    tails.push_back(spectral_decay_report(f).tail);
  }
  CHECK(tail_trend(tails).monotone);
  tails.push_back(tails.back() * 2.0 + 1e-20);
  const auto tt = tail_trend(tails);
  CHECK_FALSE(tt.monotone);
  CHECK(tt.first_increase == tails.size() - 1);

  CHECK(spectral_decay_report(RealField(g)).tail == 0.0);
}
