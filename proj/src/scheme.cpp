#include "bouss/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bouss/errors.hpp"

namespace bouss {

int default_mode_count(double L) {
  if (!(L > std::numbers::pi) || !std::isfinite(L)) {
    std::ostringstream msg;
    msg << "L = " << L << " leaves no stable mode; need L > pi";
    throw ConfigError(msg.str());
  }
  return static_cast<int>(std::floor(L / std::numbers::pi));
}

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  const double y2 = (x - 2.0) * (x - 2.0);
  return x2 * x2 * y2 * y2;
}

DampingProfile damping_profile(int N, double d0, int Nd) {
  if (N < 1) throw ConfigError("damping profile needs N >= 1");
  if (Nd <= 0 || Nd >= N) throw ConfigError("damping ramp width Nd must satisfy 0 < Nd < N");
  if (!(d0 >= 0.0) || !std::isfinite(d0)) throw ConfigError("damping strength d0 must be >= 0");

  DampingProfile p{d0, Nd, std::vector<double>(2 * static_cast<std::size_t>(N), 0.0)};
  const double w = Nd;
  for (int j = -N; j <= -N + Nd; ++j)
    p.values[static_cast<std::size_t>(j + N)] = d0 * (1.0 - smooth_step((j + N) / w));
  for (int j = N - 1 - Nd; j <= N - 1; ++j)
    p.values[static_cast<std::size_t>(j + N)] = d0 * smooth_step((j - N + Nd + 1) / w);
  return p;
}

DampingProfile no_damping(int N) {
  return {0.0, 0, std::vector<double>(2 * static_cast<std::size_t>(N), 0.0)};
}

SchemeConfig SchemeConfig::resolved() const {
  SchemeConfig c = *this;
  if (c.N == 0) c.N = default_mode_count(c.L);
  if (c.Nd == 0) c.Nd = std::max(1, c.N / 8);
  return c;
}

void SchemeConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L: must be a positive finite number");
  if (N < 1) throw ConfigError("N: must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final: must be >= 0");
  if (damping_enabled) {
    if (!(d0 >= 0.0) || !std::isfinite(d0)) throw ConfigError("d0: must be >= 0");
    if (Nd < 1 || Nd >= N) {
      std::ostringstream msg;
      msg << "Nd: ramp width " << Nd << " must satisfy 0 < Nd < N = " << N;
      throw ConfigError(msg.str());
    }
    if (!(dt * d0 < 2.7)) {
      std::ostringstream msg;
      msg << "dt: dt*d0 = " << dt * d0 << " exceeds the RK4 stability guard 2.7";
      throw ConfigError(msg.str());
    }
  }
}

PeriodicGrid SchemeConfig::grid() const { return {L, N}; }

DampingProfile SchemeConfig::damping() const {
  return damping_enabled ? damping_profile(N, d0, Nd) : no_damping(N);
}

namespace {

std::vector<cplx> real_spectrum(const PhysicalField& f) {
  auto F = forward_dft(f);
  enforce_hermitian(F.coeffs);
  return std::move(F.coeffs);
}

}  // namespace

SpectralState prepare_initial_state_from_antiderivative(const PhysicalField& u0,
                                                        const PhysicalField& v0) {
  if (!(u0.grid == v0.grid)) throw ConfigError("u0 and v0 sampled on different grids");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(u0.values) || !finite(v0.values)) throw DataError("initial data has non-finite samples");
  return {0.0, real_spectrum(u0), real_spectrum(v0)};
}

SpectralState prepare_initial_state(const PhysicalField& u0, const PhysicalField& u1) {
  if (!(u0.grid == u1.grid)) throw ConfigError("u0 and u1 sampled on different grids");
  // Periodic trapezoid rule: h * sum of samples.
  double sum = 0.0, peak = 0.0;
  for (double v : u1.values) {
    sum += v;
    peak = std::max(peak, std::abs(v));
  }
  const double mean = sum * u1.grid.spacing();
  const double L = u1.grid.half_period();
  if (std::abs(mean) > 1e-8 * L * peak) {
    std::ostringstream msg;
    msg << "u_t(x,0) must integrate to zero over [-L, L); trapezoid integral is " << mean;
    throw DataError(msg.str());
  }
  return prepare_initial_state_from_antiderivative(u0, cumulative_integral(u1));
}

BoussinesqRhs::BoussinesqRhs(const PeriodicGrid& grid, DampingProfile damping)
    : BoussinesqRhs(grid, std::move(damping), Options{}) {}

BoussinesqRhs::BoussinesqRhs(const PeriodicGrid& grid, DampingProfile damping, Options opts)
    : grid_(grid),
      damping_(std::move(damping)),
      opts_(opts),
      k_(grid.size()),
      ux_(grid.size()),
      prod_(grid.size()),
      fast_(grid.modes()) {
  if (damping_.values.size() != grid.size())
    throw ConfigError("damping profile size does not match the grid");
  for (int j = -grid.modes(); j < grid.modes(); ++j) k_[grid.slot(j)] = grid.wavenumber(j);
}

void BoussinesqRhs::operator()(const SpectralState& s, SpectralState& ds) {
  const std::size_t n = grid_.size();
  ds.t = s.t;
  ds.u_hat.resize(n);
  ds.v_hat.resize(n);

  if (opts_.nonlinear) {
    for (std::size_t m = 0; m < n; ++m) ux_[m] = cplx{0.0, k_[m]} * s.u_hat[m];
    if (opts_.product == ProductMethod::dealiased)
      fast_(ux_, s.u_hat, prod_);
    else
      truncated_convolution(grid_.modes(), ux_, s.u_hat, prod_);
  } else {
    std::fill(prod_.begin(), prod_.end(), cplx{});
  }

  for (std::size_t m = 0; m < n; ++m) {
    const double k = k_[m];
    const cplx ik{0.0, k};
    const cplx u = s.u_hat[m];
    ds.u_hat[m] = ik * s.v_hat[m] - damping_.values[m] * u;
    // (ik)^3 = -i k^3
    ds.v_hat[m] = ik * u + 2.0 * prod_[m] + cplx{0.0, -k * k * k} * u;
  }

  if (opts_.enforce_reality) {
    enforce_hermitian(ds.u_hat);
    enforce_hermitian(ds.v_hat);
  }
}

}  // namespace bouss
