#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "bouss/errors.hpp"
#include "bouss/scheme.hpp"
#include "bouss/waves.hpp"

using namespace bouss;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

std::vector<cplx> random_hermitian(std::size_t n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  enforce_hermitian(v);
  return v;
}
}  // namespace

TEST_CASE("default mode count") {
  CHECK(default_mode_count(200.0) == 63);
  CHECK(default_mode_count(1200.0) == 381);
  CHECK(default_mode_count(pi + 1e-6) == 1);
  CHECK_THROWS_AS(default_mode_count(pi), ConfigError);
  CHECK_THROWS_AS(default_mode_count(1.0), ConfigError);
}

TEST_CASE("smooth step") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.5) == Approx(0.31640625).epsilon(1e-15));
  // C1 joins: the central difference across each end tends to zero with h.
  const double h = 1e-7;
  for (double x : {0.0, 1.0})
    CHECK(std::abs((smooth_step(x + h) - smooth_step(x - h)) / (2 * h)) < 1e-6);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = smooth_step(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("damping profile shape") {
  const int N = 128, Nd = 16;
  const double d0 = 10.0;
  auto p = damping_profile(N, d0, Nd);
  CHECK(p(-N) == d0);
  CHECK(p(N - 1) == d0);
  CHECK(p(0) == 0.0);
  for (int j = -N + Nd + 1; j < N - 1 - Nd; ++j) CHECK(p(j) == 0.0);
  for (int j = -N; j < N; ++j) {
    CHECK(p(j) >= 0.0);
    CHECK(p(j) <= d0);
  }
  for (int j = -N; j < -N + Nd; ++j) CHECK(p(j) >= p(j + 1));
  for (int j = N - 1 - Nd; j < N - 1; ++j) CHECK(p(j) <= p(j + 1));

  auto thin = damping_profile(8, 5.0, 1);
  CHECK(thin(-8) == 5.0);
  CHECK(thin(-7) == 0.0);
  CHECK(thin(6) == 0.0);
  CHECK(thin(7) == 5.0);

  CHECK_THROWS_AS(damping_profile(8, 1.0, 8), ConfigError);
  CHECK_THROWS_AS(damping_profile(8, 1.0, 0), ConfigError);
}

TEST_CASE("scheme config validation") {
  SchemeConfig c;
  c.L = 200.0;
  c.t_final = 10.0;
  auto r = c.resolved();
  CHECK(r.N == 63);
  CHECK(r.Nd == 7);
  CHECK_NOTHROW(r.validate());
  r.dt = 0.3;
  CHECK_THROWS_AS(r.validate(), ConfigError);
  r.damping_enabled = false;
  CHECK_NOTHROW(r.validate());
  r.damping_enabled = true;
  r.dt = 0.1;
  r.Nd = r.N;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("initial state preparation") {
  PeriodicGrid g(200.0, 63);
  auto u0 = PhysicalField::sample(g, [](double x) { return 0.05 / std::pow(std::cosh(0.09 * x), 2); });
  auto s = prepare_initial_state(u0, PhysicalField::sample(g, [](double) { return 0.0; }));
  for (auto v : s.v_hat) CHECK(v == cplx{});
  CHECK(s.t == 0.0);
  CHECK(hermitian_defect(s.u_hat) == 0.0);

  CHECK_THROWS_AS(prepare_initial_state(u0, PhysicalField::sample(g, [](double) { return 0.1; })),
                  DataError);
}

TEST_CASE("trapezoid running integral of soliton velocity data") {
  auto sol = SolitonDescriptor::from_amplitude(0.05);
  auto prof = soliton_initial_data(sol);
  PeriodicGrid g(200.0, 63);
  auto v0 = cumulative_integral(prof.sample_u1(g));
  // Oracle: fine composite Simpson from -L to each grid point.
  const double L = g.half_period();
  for (int j = -63; j < 63; j += 9) {
    const double x = g.point(j);
    const int n = 2 * 2000;
    const double h = (x + L) / n;
    double acc = 0.0;
    if (n > 0 && h > 0.0) {
      for (int m = 0; m <= n; ++m) {
        const double w = (m == 0 || m == n) ? 1.0 : (m % 2 ? 4.0 : 2.0);
        acc += w * prof.u1(-L + m * h);
      }
      acc *= h / 3.0;
    }
    const double exact = -sol.c * (prof.u0(x) - prof.u0(-L));
    CHECK(std::abs(acc - exact) < 1e-10);
  }
}

TEST_CASE("trapezoid running integral converges at second order") {
  auto sol = SolitonDescriptor::from_amplitude(0.05);
  auto prof = soliton_initial_data(sol);
  auto err_at_zero = [&](int N) {
    PeriodicGrid g(200.0, N);
    auto v0 = cumulative_integral(prof.sample_u1(g));
    return std::abs(v0.values[g.slot(0)] + sol.c * (prof.u0(0.0) - prof.u0(-200.0)));
  };
  const double ratio = err_at_zero(63) / err_at_zero(126);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("rhs of the zero state vanishes") {
  PeriodicGrid g(50.0, 15);
  BoussinesqRhs rhs(g, damping_profile(15, 10.0, 2));
  SpectralState s{0.0, std::vector<cplx>(g.size()), std::vector<cplx>(g.size())}, ds;
  rhs(s, ds);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(ds.u_hat[i] == cplx{});
    CHECK(ds.v_hat[i] == cplx{});
  }
}

TEST_CASE("rhs for a single mode") {
  const double L = 40.0, eps = 1e-3;
  const int N = 12;
  PeriodicGrid g(L, N);
  BoussinesqRhs rhs(g, no_damping(N), {ProductMethod::direct, true, false});
  SpectralState s{0.0, std::vector<cplx>(g.size()), std::vector<cplx>(g.size())}, ds;
  s.u_hat[g.slot(1)] = eps;
  rhs(s, ds);
  const cplx ik{0.0, pi / L};
  CHECK(std::abs(ds.v_hat[g.slot(1)] - (ik * eps + ik * ik * ik * eps)) < 1e-15);
  CHECK(std::abs(ds.v_hat[g.slot(2)] - 2.0 * ik * eps * eps) < 1e-18);
  for (int j = -N; j < N; ++j)
    if (j != 1 && j != 2) CHECK(std::abs(ds.v_hat[g.slot(j)]) < 1e-18);
  CHECK(std::abs(ds.u_hat[g.slot(1)]) == 0.0);
}

TEST_CASE("rhs matches an independent evaluation of the damped system") {
  std::mt19937_64 rng(31);
  const int N = 9;
  const double L = 30.0;
  PeriodicGrid g(L, N);
  auto damp = damping_profile(N, 10.0, 2);
  SpectralState s{0.0, random_hermitian(g.size(), rng, 0.1), random_hermitian(g.size(), rng, 0.1)}, ds;

  for (auto method : {ProductMethod::direct, ProductMethod::dealiased}) {
    BoussinesqRhs rhs(g, damp, {method, true, false});
    rhs(s, ds);
    for (int j = -N; j < N; ++j) {
      const double k = pi * j / L;
      cplx conv{};
      for (int l = -N; l < N; ++l) {
        const int m = j - l;
        if (m < -N || m >= N) continue;
        conv += cplx{0.0, pi * l / L} * s.u_hat[g.slot(l)] * s.u_hat[g.slot(m)];
      }
      const cplx U = s.u_hat[g.slot(j)], V = s.v_hat[g.slot(j)];
      const cplx ut = cplx{0.0, k} * V - damp(j) * U;
      const cplx vt = cplx{0.0, k} * U + 2.0 * conv + std::pow(cplx{0.0, k}, 3) * U;
      CHECK(std::abs(ds.u_hat[g.slot(j)] - ut) < 1e-14);
      CHECK(std::abs(ds.v_hat[g.slot(j)] - vt) < 1e-14);
    }
  }
}

TEST_CASE("mass mode is stationary and reality projection holds") {
  std::mt19937_64 rng(2);
  const int N = 20;
  PeriodicGrid g(70.0, N);
  BoussinesqRhs rhs(g, damping_profile(N, 10.0, 2));
  SpectralState s{0.0, random_hermitian(g.size(), rng, 0.2), random_hermitian(g.size(), rng, 0.2)}, ds;
  rhs(s, ds);
  CHECK(ds.u_hat[g.slot(0)] == cplx{});
  CHECK(hermitian_defect(ds.u_hat) == 0.0);
  CHECK(hermitian_defect(ds.v_hat) == 0.0);
}

TEST_CASE("linearized modes inside the cutoff are neutrally stable") {
  const double L = 200.0;
  const int N = default_mode_count(L);
  for (int j = -N; j < N; ++j) {
    const double k = pi * j / L;
    Eigen::Matrix2cd M;
    M << 0.0, cplx{0.0, k}, cplx{0.0, k} + std::pow(cplx{0.0, k}, 3), 0.0;
    const auto ev = M.eigenvalues();
    if (k * k <= 1.0) {
      CHECK(std::abs(ev(0).real()) < 1e-12);
      CHECK(std::abs(ev(1).real()) < 1e-12);
    }
  }
  // One mode past the cutoff carries a growing eigenvalue k sqrt(k^2 - 1).
  const double k = pi * (N + 1) / L;
  CHECK(k * k > 1.0);
  Eigen::Matrix2cd M;
  M << 0.0, cplx{0.0, k}, cplx{0.0, k} + std::pow(cplx{0.0, k}, 3), 0.0;
  const auto ev = M.eigenvalues();
  CHECK(std::max(ev(0).real(), ev(1).real()) == Approx(k * std::sqrt(k * k - 1.0)).epsilon(1e-10));
}
