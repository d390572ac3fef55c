#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bouss/errors.hpp"
#include "bouss/integrator.hpp"
#include "bouss/waves.hpp"

using namespace bouss;
using Catch::Approx;

namespace {

SpectralState zero_state(std::size_t n) {
  return {0.0, std::vector<cplx>(n), std::vector<cplx>(n)};
}

SchemeConfig config(double L, double t_final, bool damping, double dt = 0.1) {
  SchemeConfig c;
  c.L = L;
  c.t_final = t_final;
  c.damping_enabled = damping;
  c.dt = dt;
  return c.resolved();
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("zero state stays zero") {
  PeriodicGrid g(30.0, 9);
  BoussinesqRhs rhs(g, damping_profile(9, 10.0, 1));
  auto s = rk4_step(zero_state(g.size()), 0.1, [&](const SpectralState& a, SpectralState& b) { rhs(a, b); });
  CHECK(s.t == Approx(0.1));
  for (auto z : s.u_hat) CHECK(z == cplx{});
}

TEST_CASE("one step on a linear oscillator has fifth-order local error") {
  const double w = 0.7;
  RhsFn osc = [w](const SpectralState& s, SpectralState& ds) {
    ds.u_hat = {cplx{0.0, w} * s.u_hat[0]};
    ds.v_hat = {cplx{}};
  };
  SpectralState s{0.0, {cplx{1.0, 0.0}}, {cplx{}}};
  auto err = [&](double dt) {
    return std::abs(rk4_step(s, dt, osc).u_hat[0] - std::exp(cplx{0.0, w * dt}));
  };
  const double e1 = err(0.2), e2 = err(0.1);
  // Leading local error is (w dt)^5 / 120.
  CHECK(e1 == Approx(std::pow(w * 0.2, 5) / 120.0).epsilon(0.05));
  CHECK(std::log2(e1 / e2) == Approx(5.0).margin(0.1));
}

TEST_CASE("final snapshot equals the initial state when t_final = 0") {
  auto prof = soliton_initial_data(SolitonDescriptor::from_amplitude(0.05));
  auto cfg = config(200.0, 0.0, true);
  auto init = prof.initial_state(cfg.grid());
  auto traj = simulate(cfg, init, {});
  REQUIRE(traj.states.size() == 1);
  CHECK(traj.snapshot_times[0] == 0.0);
  CHECK(max_diff(traj.states[0].u_hat, init.u_hat) == 0.0);
}

TEST_CASE("snapshots land exactly and runs are deterministic") {
  auto prof = soliton_initial_data(SolitonDescriptor::from_amplitude(0.05));
  auto cfg = config(200.0, 1.0, true);
  auto init = prof.initial_state(cfg.grid());
  int steps = 0;
  auto traj = simulate(cfg, init, {0.25, 0.5, 1.0}, [&](const SpectralState&) { ++steps; });
  REQUIRE(traj.states.size() == 3);
  CHECK(traj.states[0].t == 0.25);
  CHECK(traj.states[2].t == 1.0);
  CHECK(steps == 11);  // 0.1, 0.2, 0.25, 0.35, 0.45, 0.5, 0.6, ..., 1.0
  auto again = simulate(cfg, init, {0.25, 0.5, 1.0});
  CHECK(max_diff(traj.states[2].u_hat, again.states[2].u_hat) == 0.0);
  CHECK(max_diff(traj.states[2].v_hat, again.states[2].v_hat) == 0.0);

  CHECK_THROWS_AS(simulate(cfg, init, {0.5, 0.25}), ConfigError);
  CHECK_THROWS_AS(simulate(cfg, init, {2.0}), ConfigError);
}

TEST_CASE("self-convergence of the time stepping is fourth order") {
  auto prof = soliton_initial_data(SolitonDescriptor::from_amplitude(0.05));
  auto run = [&](double dt) {
    auto cfg = config(200.0, 10.0, false, dt);
    return simulate(cfg, prof.initial_state(cfg.grid()), {10.0}).states[0];
  };
  const auto a = run(0.8), b = run(0.4), c = run(0.2);
  const double ratio = max_diff(a.u_hat, b.u_hat) / max_diff(b.u_hat, c.u_hat);
  CHECK(ratio == Approx(16.0).margin(3.0));
  CHECK(std::log2(ratio) >= 3.5);
}

TEST_CASE("mass and symmetry are preserved over long runs") {
  auto prof = perturbed_soliton_data(0.05);
  auto cfg = config(200.0, 1000.0, true);
  auto init = prof.initial_state(cfg.grid());
  const cplx mass0 = init.u_hat[cfg.grid().slot(0)];
  double drift = 0.0, defect = 0.0;
  auto traj = simulate(cfg, init, {1000.0}, [&](const SpectralState& s) {
    drift = std::max(drift, std::abs(s.u_hat[cfg.grid().slot(0)] - mass0));
    defect = std::max({defect, hermitian_defect(s.u_hat), hermitian_defect(s.v_hat)});
  });
  CHECK(drift < 1e-12);
  CHECK(defect < 1e-10);
}

TEST_CASE("damping dissipates ramp modes") {
  // For one linear mode E = (1 - k^2)|U|^2 + |V|^2 obeys dE/dt = -2 d (1 - k^2)|U|^2.
  const double L = 200.0;
  const int N = default_mode_count(L);
  PeriodicGrid g(L, N);
  auto damp = damping_profile(N, 10.0, N / 8);
  BoussinesqRhs rhs(g, damp, {ProductMethod::direct, false, false});
  RhsFn fn = [&](const SpectralState& a, SpectralState& b) { rhs(a, b); };
  int tested = 0;
  for (int j = -N; j < N; ++j) {
    if (damp(j) == 0.0) continue;
    ++tested;
    const double k = g.wavenumber(j);
    const auto sl = g.slot(j);
    auto energy = [&](const SpectralState& s) {
      return (1.0 - k * k) * std::norm(s.u_hat[sl]) + std::norm(s.v_hat[sl]);
    };
    auto s = zero_state(g.size());
    s.u_hat[sl] = 1e-3;
    SpectralState ds;
    rhs(s, ds);
    // With V = 0 the modulus of U starts out decaying at rate d.
    CHECK(std::abs(ds.u_hat[sl] + damp(j) * s.u_hat[sl]) < 1e-18);
    double prev = energy(s);
    Rk4Stepper stepper(fn);
    for (int n = 0; n < 200; ++n) {
      stepper.step(s, 0.1);
      const double now = energy(s);
      REQUIRE(now <= prev);
      prev = now;
    }
    CHECK(prev < 1e-6 * (1.0 - k * k));
  }
  CHECK(tested == 2 * (N / 8));
}

TEST_CASE("modes above the cutoff blow up without damping") {
  auto prof = gaussian_data({{-0.05, 0.0, 0.02}});
  SchemeConfig c;
  c.L = 50.0;
  c.N = 2 * default_mode_count(50.0);
  c.damping_enabled = false;
  c.t_final = 500.0;
  auto cfg = c.resolved();
  auto init = prof.initial_state(cfg.grid());
  try {
    simulate(cfg, init, {500.0});
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 500.0);
    CHECK(e.last_finite().t < e.time());
    UNSCOPED_INFO("observed blow-up time " << e.time());
  }
}

TEST_CASE("reconstruction") {
  PeriodicGrid g(25.0, 11);
  SpectralState s = zero_state(g.size());
  s.u_hat[g.slot(0)] = 0.3;
  const std::vector<double> pts{-25.0, -1.0, 0.0, 7.5, 25.0};
  for (double v : reconstruct(g, s, pts)) CHECK(v == Approx(0.3).margin(1e-15));

  auto prof = gaussian_data({{0.4, 2.0, 0.05}});
  auto st = prof.initial_state(g);
  auto grid_vals = inverse_dft(SpectralField(g, st.u_hat)).values;
  auto at_nodes = reconstruct(g, st, g.points());
  for (std::size_t i = 0; i < at_nodes.size(); ++i) CHECK(at_nodes[i] == Approx(grid_vals[i]).margin(1e-12));
}
