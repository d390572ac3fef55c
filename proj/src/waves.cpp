#include "bouss/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bouss/errors.hpp"

namespace bouss {

double soliton_speed(double amplitude) { return std::sqrt(1.0 + 2.0 * amplitude / 3.0); }

SolitonDescriptor SolitonDescriptor::from_amplitude(double A, double x0) {
  if (!(A > 0.0)) throw DomainError("soliton amplitude must be positive");
  return {A, x0, soliton_speed(A)};
}

double soliton_value(const SolitonDescriptor& s, double x, double t) {
  const double ch = std::cosh(std::sqrt(s.A / 6.0) * (x - s.x0 - s.c * t));
  return s.A / (ch * ch);
}

PhysicalField InitialProfile::sample_u0(const PeriodicGrid& g) const {
  return PhysicalField::sample(g, u0);
}

PhysicalField InitialProfile::sample_u1(const PeriodicGrid& g) const {
  return PhysicalField::sample(g, u1);
}

PhysicalField InitialProfile::sample_v0(const PeriodicGrid& g) const {
  const double base = v0(-g.half_period());
  return PhysicalField::sample(g, [&](double x) { return v0(x) - base; });
}

SpectralState InitialProfile::initial_state(const PeriodicGrid& g) const {
  return prepare_initial_state_from_antiderivative(sample_u0(g), sample_v0(g));
}

namespace {

double sech2(double y) {
  const double ch = std::cosh(y);
  return 1.0 / (ch * ch);
}

// d/dx of A sech^2(a x) = -2 A a tanh(a x) sech^2(a x)
double sech2_slope(double A, double a, double x) {
  return -2.0 * A * a * std::tanh(a * x) * sech2(a * x);
}

}  // namespace

InitialProfile soliton_initial_data(const SolitonDescriptor& s) {
  const double A = s.A, x0 = s.x0, c = s.c, a = std::sqrt(s.A / 6.0);
  InitialProfile p;
  p.name = "soliton";
  p.u0 = [=](double x) { return A * sech2(a * (x - x0)); };
  p.u0x = [=](double x) { return sech2_slope(A, a, x - x0); };
  p.u1 = [=](double x) { return -c * sech2_slope(A, a, x - x0); };
  p.v0 = [=](double x) { return -c * A * sech2(a * (x - x0)); };
  return p;
}

InitialProfile gaussian_data(std::vector<GaussianTerm> terms) {
  for (const auto& g : terms)
    if (!std::isfinite(g.amplitude) || !std::isfinite(g.center) || !(g.rate > 0.0))
      throw ConfigError("Gaussian terms need finite amplitude/center and positive rate");
  InitialProfile p;
  p.name = "gaussian";
  p.u0 = [terms](double x) {
    double sum = 0.0;
    for (const auto& g : terms) sum += g.amplitude * std::exp(-g.rate * (x - g.center) * (x - g.center));
    return sum;
  };
  p.u0x = [terms](double x) {
    double sum = 0.0;
    for (const auto& g : terms) {
      const double y = x - g.center;
      sum += -2.0 * g.rate * y * g.amplitude * std::exp(-g.rate * y * y);
    }
    return sum;
  };
  p.u1 = [](double) { return 0.0; };
  p.v0 = [](double) { return 0.0; };
  return p;
}

InitialProfile three_gaussians(double a, double b, double c) {
  auto p = gaussian_data({{-3.0 * a, b, c}, {-2.0 * a, 0.0, c}, {-a, -b, c}});
  p.name = "three-gaussians";
  return p;
}

InitialProfile perturbed_soliton_data(double A) {
  if (!(A > 0.0)) throw DomainError("perturbed soliton needs A > 0");
  const double a = std::sqrt(A / 6.0), c = soliton_speed(A);
  auto u0 = [=](double x) { return A * sech2(a * x) - (A / 3.0) * std::exp(-A * x * x); };
  auto u0x = [=](double x) {
    return sech2_slope(A, a, x) + (2.0 * A * A / 3.0) * x * std::exp(-A * x * x);
  };
  InitialProfile p;
  p.name = "perturbed-soliton";
  p.u0 = u0;
  p.u0x = u0x;
  p.u1 = [=](double x) { return -c * u0x(x); };
  p.v0 = [=](double x) { return -c * u0(x); };
  return p;
}

double linf_error(const PeriodicGrid& grid, const SpectralState& s, const Profile& reference,
                  double lo, double hi, std::size_t count) {
  const auto U = sample_uniform(grid, s.u_hat, lo, hi, count);
  const double dx = (hi - lo) / static_cast<double>(count);
  double e = 0.0;
  for (std::size_t m = 0; m < count; ++m)
    e = std::max(e, std::abs(U[m] - reference(lo + static_cast<double>(m) * dx)));
  return e;
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("linf_distance: size mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

PeakTrack track_peak(const Trajectory& traj, const PeakWindow& window, double fit_from,
                     double fit_to, double resolution) {
  if (!(resolution > 0.0)) throw ConfigError("track_peak: resolution must be positive");
  const PeriodicGrid grid = traj.config.grid();
  const double L = grid.half_period();
  PeakTrack out;

  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double t = traj.snapshot_times[i];
    if (t < fit_from || t > fit_to) continue;
    const double lo = window.lo(t), hi = window.hi(t);
    const auto count = static_cast<std::size_t>(std::max(0.0, std::floor((hi - lo) / resolution)));
    std::ostringstream tag;
    tag << "t=" << t << ": ";
    if (count < 3) {
      out.warnings.push_back(tag.str() + "empty window");
      continue;
    }
    if (lo < -L || hi > L) out.warnings.push_back(tag.str() + "window leaves [-L, L] and wraps");

    const double dx = (hi - lo) / static_cast<double>(count);
    const auto u = sample_uniform(grid, traj.states[i].u_hat, lo, hi, count);
    const auto top = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());

    // Count separate excursions above half the peak height.
    int humps = 0;
    bool above = false;
    for (double v : u) {
      const bool now = v > 0.5 * u[top];
      if (now && !above) ++humps;
      above = now;
    }
    if (humps > 1) out.warnings.push_back(tag.str() + "window holds more than one hump");

    double x = lo + static_cast<double>(top) * dx, amp = u[top];
    if (top == 0 || top + 1 == count) {
      out.warnings.push_back(tag.str() + "maximum on window edge");
    } else {
      const double ym = u[top - 1], y0 = u[top], yp = u[top + 1];
      const double curv = ym - 2.0 * y0 + yp;
      if (curv < 0.0) {
        const double p = 0.5 * (ym - yp) / curv;
        x += p * dx;
        amp = y0 - 0.25 * (ym - yp) * p;
      }
    }
    out.times.push_back(t);
    out.amplitude.push_back(amp);
    out.position.push_back(x);
  }

  const std::size_t n = out.times.size();
  if (n < 2) {
    out.speed = std::numeric_limits<double>::quiet_NaN();
    out.warnings.push_back("fewer than two snapshots in the fitting range; no speed fit");
    return out;
  }
  double tm = 0.0, xm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tm += out.times[i];
    xm += out.position[i];
  }
  tm /= static_cast<double>(n);
  xm /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (out.times[i] - tm) * (out.position[i] - xm);
    sxx += (out.times[i] - tm) * (out.times[i] - tm);
  }
  out.speed = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  return out;
}

RegimeParameters regime_check(double amplitude, double wavelength) {
  if (!(amplitude > 0.0) || !(wavelength > 0.0))
    throw DomainError("regime_check needs positive amplitude and wavelength");
  const double eps = 2.0 * amplitude / 3.0;
  const double delta = std::sqrt(3.0) / wavelength;
  // Boundary values such as A = 0.15 land a rounding error below 0.1.
  constexpr double cut = 0.1 - 1e-12;
  return {eps, delta, eps >= cut || delta >= cut};
}

double PhysicalUnits::elevation(double u) const { return 2.0 * depth * u / 3.0; }
double PhysicalUnits::position(double x) const { return x * depth / std::sqrt(3.0); }
double PhysicalUnits::time_scale() const { return std::sqrt(depth / (3.0 * gravity)); }
double PhysicalUnits::time(double t) const { return t * time_scale(); }

PhysicalUnits physical_units(double depth, double gravity) {
  if (!(depth > 0.0)) throw DomainError("water depth must be positive");
  if (!(gravity > 0.0)) throw DomainError("gravity must be positive");
  return {depth, gravity};
}

}  // namespace bouss
