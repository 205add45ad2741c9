#include "fowler/grid.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace fowler;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("make_grid spacing and sample points") {
  const Grid g = make_grid(8, 8.0);
  CHECK(g.dx() == 1.0);
  CHECK(g.x(0) == -4.0);
  CHECK(g.x(7) == 3.0);
  CHECK(make_grid(1024, 40.0).dx() == 0.0390625);
  CHECK(g.dx() * g.n() == g.length());
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_WITH(make_grid(7, 1.0), "n must be even");
  CHECK_THROWS_WITH(make_grid(6, 1.0), ContainsSubstring("at least 8"));
  CHECK_THROWS_AS(make_grid(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8, -1.0), std::invalid_argument);
}

TEST_CASE("wavenumber layout is FFT order") {
  const Grid g(8, 1.0);
  const long expect[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(g.wavenumber(i) == expect[i]);
    CHECK(g.index_of(expect[i]) == i);
  }
  CHECK(g.nyquist_index() == 4);
  CHECK_THROWS(g.index_of(4));
}

TEST_CASE("forward transform of a constant") {
  const Grid g(64, 8.0);
  const auto F = forward_transform(RealField::sample(g, [](double) { return 1.0; }));
  CHECK_THAT(F[0].real(), WithinAbs(8.0, 1e-13));
  for (std::size_t i = 1; i < g.n(); ++i) CHECK(std::abs(F[i]) < 1e-13);
}

TEST_CASE("forward transform of a Gaussian matches its continuous transform") {
  const Grid g(1024, 40.0);
  const auto f = RealField::sample(g, [](double x) { return std::exp(-oracle::pi * x * x); });
  const auto F = forward_transform(f);
  double err = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double xi = g.xi(i);
    err = std::max(err, std::abs(F[i] - std::exp(-oracle::pi * xi * xi)));
  }
  CHECK(err <= 1e-12);

  // long-double direct evaluation of the same sum
  const auto D = oracle::direct_transform(g, oracle::values(f));
  double derr = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) derr = std::max(derr, std::abs(F[i] - D[i]));
  CHECK(derr <= 1e-13);
}

TEST_CASE("forward transform of the first cosine mode") {
  const Grid g(32, 5.0);
  const auto F = forward_transform(
      RealField::sample(g, [&](double x) { return std::cos(2.0 * oracle::pi * x / 5.0); }));
  CHECK_THAT(F.at(1).real(), WithinAbs(2.5, 1e-13));
  CHECK_THAT(F.at(-1).real(), WithinAbs(2.5, 1e-13));
  for (long k = -16; k < 16; ++k)
    if (std::labs(k) != 1) CHECK(std::abs(F.at(k)) < 1e-13);
}

TEST_CASE("forward transform agrees with direct summation for random data") {
  const Grid g(48, 3.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::vector<double> v(g.n());
  for (double& x : v) x = nd(rng);
  const auto F = forward_transform(RealField(g, v));
  const auto D = oracle::direct_transform(g, v);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(std::abs(F[i] - D[i]) < 1e-13);
  CHECK(F.hermitian_defect() < 1e-14);
}

TEST_CASE("inverse transform") {
  const Grid g(64, 8.0);
  SpectralField F(g);
  F[0] = 8.0;
  const auto f = inverse_transform(F);
  for (double v : f.values()) CHECK_THAT(v, WithinAbs(1.0, 1e-14));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(g.n());
    for (double& x : v) x = nd(rng);
    const RealField r(g, v);
    CHECK(oracle::rel_l2(oracle::values(inverse_transform(forward_transform(r))), v) <= 1e-12);
  }
}

TEST_CASE("inverse transform rejects broken Hermitian pairing") {
  const Grid g(16, 2.0);
  SpectralField F(g);
  F.at(1) = cplx(0.0, 1.0);
  F.at(-1) = cplx(0.0, 1.0);  // conj would be -i
  CHECK_THROWS_AS(inverse_transform(F), std::domain_error);
  F.at(-1) = cplx(0.0, -1.0);
  CHECK_NOTHROW(inverse_transform(F));
}

TEST_CASE("spectral derivatives") {
  const Grid g(1024, 40.0);
  const auto c = RealField::sample(g, [](double) { return 3.0; });
  CHECK(derivative(c, 1).max_abs() < 1e-14);
  CHECK(derivative(c, 2).max_abs() < 1e-14);

  const double w = 2.0 * oracle::pi / 40.0;
  const auto cs = RealField::sample(g, [&](double x) { return std::cos(w * x); });
  const auto d2 = derivative(cs, 2);
  for (std::size_t j = 0; j < g.n(); ++j)
    CHECK_THAT(d2[j], WithinAbs(-w * w * std::cos(w * g.x(j)), 1e-11));  // roundoff x xi_N^2

  const auto gs = RealField::sample(g, [](double x) { return std::exp(-oracle::pi * x * x); });
  const auto d1 = derivative(gs, 1);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    err = std::max(err, std::abs(d1[j] + 2.0 * oracle::pi * x * std::exp(-oracle::pi * x * x)));
  }
  CHECK(err <= 1e-10);

  CHECK_THROWS_AS(spectral_derivative(forward_transform(gs), 0), std::invalid_argument);
}

TEST_CASE("odd derivatives zero the Nyquist mode, even ones keep it real") {
  const Grid g(16, 2.0);
  SpectralField F(g);
  F[g.nyquist_index()] = 5.0;
  CHECK(spectral_derivative(F, 1)[g.nyquist_index()] == cplx(0.0, 0.0));
  const cplx d2 = spectral_derivative(F, 2)[g.nyquist_index()];
  CHECK(d2.imag() == 0.0);
  CHECK_THAT(d2.real(), WithinRel(-5.0 * std::pow(2.0 * oracle::pi * g.nyquist_xi(), 2), 1e-14));
}

TEST_CASE("Parseval and linearity") {
  const Grid g(256, 12.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = oracle::random_band_limited(g, 60, seed, true);
    const auto b = oracle::random_band_limited(g, 90, seed + 100, true);
    long double phys = 0;
    for (double v : a.values()) phys += (long double)v * v;
    phys *= g.dx();
    const double spec = std::pow(spectral_l2_norm(forward_transform(a)), 2);
    CHECK_THAT(spec, WithinRel(static_cast<double>(phys), 1e-12));

    const double alpha = 0.7, beta = -1.3;
    const auto lhs = forward_transform(alpha * a + beta * b);
    const auto rhs = cplx(alpha) * forward_transform(a) + cplx(beta) * forward_transform(b);
    CHECK((lhs - rhs).max_abs() <= 1e-12 * lhs.max_abs());
    const auto back = inverse_transform(rhs);
    CHECK(oracle::rel_l2(oracle::values(back), oracle::values(alpha * a + beta * b)) <= 1e-12);
  }
}

TEST_CASE("grid-aligned translation multiplies by a phase") {
  const Grid g(128, 10.0);
  const auto f = oracle::random_band_limited(g, 40, 3);
  const std::size_t m = 5;
  const double a = m * g.dx();
  std::vector<double> shifted(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) shifted[j] = f[(j + g.n() - m) % g.n()];  // f(x - a)
  const auto lhs = forward_transform(RealField(g, shifted));
  const auto F = forward_transform(f);
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (i == g.nyquist_index()) continue;
    const cplx phase = std::polar(1.0, -2.0 * oracle::pi * g.xi(i) * a);
    CHECK(std::abs(lhs[i] - phase * F[i]) <= 1e-12 * F.max_abs());
  }
}

TEST_CASE("trigonometric interpolation and spectral shift") {
  const Grid g(256, 20.0);
  auto fn = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
  const auto F = forward_transform(RealField::sample(g, fn));
  for (double x : {-3.21, -0.5, 0.0137, 1.9, 4.4}) CHECK_THAT(interpolate(F, x), WithinAbs(fn(x), 1e-12));
  const auto s = inverse_transform(shift_spectrum(F, 0.37));
  for (std::size_t j = 0; j < g.n(); ++j) CHECK_THAT(s[j], WithinAbs(fn(g.x(j) + 0.37), 1e-12));
}

TEST_CASE("fields reject non-finite values and mismatched sizes") {
  const Grid g(8, 1.0);
  CHECK_THROWS_AS(RealField(g, std::vector<double>(7, 0.0)), std::invalid_argument);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  CHECK_THROWS_AS(RealField(g, v), std::domain_error);
  CHECK_THROWS_AS(RealField(g) + RealField(Grid(8, 2.0)), std::invalid_argument);
}
