#include "bouss/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "bouss/errors.hpp"

namespace bouss {

namespace {

// tmp = s + h * k
void axpy(const SpectralState& s, double h, const SpectralState& k, SpectralState& out) {
  const std::size_t n = s.u_hat.size();
  out.t = s.t + h;
  out.u_hat.resize(n);
  out.v_hat.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    out.u_hat[m] = s.u_hat[m] + h * k.u_hat[m];
    out.v_hat[m] = s.v_hat[m] + h * k.v_hat[m];
  }
}

bool healthy(const SpectralState& s, double& worst) {
  worst = 0.0;
  for (std::size_t m = 0; m < s.u_hat.size(); ++m) {
    const cplx u = s.u_hat[m], v = s.v_hat[m];
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag()) || !std::isfinite(v.real()) ||
        !std::isfinite(v.imag()))
      return false;
    worst = std::max(worst, std::abs(u));
  }
  return worst <= kBlowUpThreshold;
}

}  // namespace

void Rk4Stepper::step(SpectralState& s, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  rhs_(s, k1_);
  axpy(s, 0.5 * dt, k1_, tmp_);
  rhs_(tmp_, k2_);
  axpy(s, 0.5 * dt, k2_, tmp_);
  rhs_(tmp_, k3_);
  axpy(s, dt, k3_, tmp_);
  rhs_(tmp_, k4_);

  const double w = dt / 6.0;
  tmp_.t = s.t + dt;
  for (std::size_t m = 0; m < s.u_hat.size(); ++m) {
    tmp_.u_hat[m] =
        s.u_hat[m] + w * (k1_.u_hat[m] + 2.0 * (k2_.u_hat[m] + k3_.u_hat[m]) + k4_.u_hat[m]);
    tmp_.v_hat[m] =
        s.v_hat[m] + w * (k1_.v_hat[m] + 2.0 * (k2_.v_hat[m] + k3_.v_hat[m]) + k4_.v_hat[m]);
  }

  double worst = 0.0;
  if (!healthy(tmp_, worst)) {
    std::ostringstream msg;
    msg << "solution blew up at t = " << tmp_.t << " (max |U^| = " << worst << ")";
    throw BlowUpError(msg.str(), tmp_.t, s);
  }
  std::swap(s, tmp_);
}

SpectralState rk4_step(const SpectralState& s, double dt, const RhsFn& rhs) {
  Rk4Stepper stepper(rhs);
  SpectralState out = s;
  stepper.step(out, dt);
  return out;
}

Trajectory simulate(const SchemeConfig& config, const SpectralState& initial,
                    std::vector<double> snapshot_times, const StepObserver& observer) {
  const SchemeConfig cfg = config.resolved();
  cfg.validate();
  auto rhs = std::make_shared<BoussinesqRhs>(
      cfg.grid(), cfg.damping(), BoussinesqRhs::Options{cfg.product, true, true});
  return simulate(
      cfg, initial, std::move(snapshot_times),
      [rhs](const SpectralState& s, SpectralState& ds) { (*rhs)(s, ds); }, observer);
}

Trajectory simulate(const SchemeConfig& config, const SpectralState& initial,
                    std::vector<double> snapshot_times, const RhsFn& rhs,
                    const StepObserver& observer) {
  const SchemeConfig cfg = config.resolved();
  cfg.validate();
  if (initial.u_hat.size() != cfg.grid().size() || initial.v_hat.size() != cfg.grid().size())
    throw ConfigError("initial state size does not match the grid");
  if (snapshot_times.empty()) snapshot_times.push_back(cfg.t_final);
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw ConfigError("snapshot times must be sorted");
  const double slack = 1e-12 * std::max(1.0, cfg.t_final);
  for (double ts : snapshot_times)
    if (!(ts >= initial.t - slack) || ts > cfg.t_final + slack)
      throw ConfigError("snapshot time outside [t0, t_final]");

  Trajectory traj{{}, {}, cfg};
  Rk4Stepper stepper(rhs);
  SpectralState s = initial;
  for (double ts : snapshot_times) {
    for (;;) {
      const double remaining = ts - s.t;
      if (remaining <= slack) break;
      const bool last = remaining <= cfg.dt * (1.0 + 1e-9);
      stepper.step(s, last ? remaining : cfg.dt);
      if (last) s.t = ts;
      if (observer) observer(s);
    }
    traj.snapshot_times.push_back(ts);
    traj.states.push_back(s);
    traj.states.back().t = ts;
  }
  return traj;
}

std::vector<double> reconstruct(const PeriodicGrid& grid, const SpectralState& s,
                                std::span<const double> points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = eval_at(grid, s.u_hat, points[i]);
  return out;
}

}  // namespace bouss
