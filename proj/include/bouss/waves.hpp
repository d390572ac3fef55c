#pragma once
// Exact one-solitons, the initial-data catalog, L-infinity error scans, peak
// tracking and the shallow-water regime helpers.

#include <functional>
#include <string>
#include <vector>

#include "bouss/integrator.hpp"

namespace bouss {

/// sqrt(1 + 2A/3).
double soliton_speed(double amplitude);

struct SolitonDescriptor {
  double A = 0.0;
  double x0 = 0.0;
  double c = 1.0;

  /// Descriptor with the speed implied by the amplitude.
  static SolitonDescriptor from_amplitude(double A, double x0 = 0.0);
};

/// A sech^2(sqrt(A/6) (x - x0 - c t)).
double soliton_value(const SolitonDescriptor& s, double x, double t);

using Profile = std::function<double(double)>;

/// Initial data as analytic profiles on the whole line.
/// `v0` is int_{-inf}^x u1, so that the running integral from -L is
/// v0(x) - v0(-L).
struct InitialProfile {
  std::string name;
  Profile u0;
  Profile u0x;
  Profile u1;
  Profile v0;

  /// Samples on the grid, with v0 shifted to vanish at x = -L.
  PhysicalField sample_u0(const PeriodicGrid& g) const;
  PhysicalField sample_u1(const PeriodicGrid& g) const;
  PhysicalField sample_v0(const PeriodicGrid& g) const;
  /// Initial state from the exact antiderivative.
  SpectralState initial_state(const PeriodicGrid& g) const;
};

InitialProfile soliton_initial_data(const SolitonDescriptor& s);

struct GaussianTerm {
  double amplitude;
  double center;
  double rate;  // u0 += amplitude * exp(-rate (x - center)^2)
};

/// Sum of Gaussians at rest.
InitialProfile gaussian_data(std::vector<GaussianTerm> terms);
/// -3a e^{-c(x-b)^2} - 2a e^{-c x^2} - a e^{-c(x+b)^2}, at rest.
InitialProfile three_gaussians(double a, double b, double c);
/// A sech^2(sqrt(A/6) x) - (A/3) e^{-A x^2}, moving with u_t = -c u_x.
InitialProfile perturbed_soliton_data(double A);

/// max |U(x,t) - reference(x)| over `count` points lo + m (hi - lo)/count.
double linf_error(const PeriodicGrid& grid, const SpectralState& s, const Profile& reference,
                  double lo, double hi, std::size_t count = 100000);
/// max |a_i - b_i|.
double linf_distance(std::span<const double> a, std::span<const double> b);

/// Window [lo0 + lo_rate t, hi0 + hi_rate t] that follows a moving hump.
struct PeakWindow {
  double lo0 = 0.0;
  double lo_rate = 0.0;
  double hi0 = 0.0;
  double hi_rate = 0.0;

  double lo(double t) const { return lo0 + lo_rate * t; }
  double hi(double t) const { return hi0 + hi_rate * t; }
};

struct PeakTrack {
  std::vector<double> times;
  std::vector<double> amplitude;
  std::vector<double> position;
  double speed = 0.0;
  std::vector<std::string> warnings;
};

/// Locates the maximum of U inside the window at each snapshot with
/// fit_from <= t <= fit_to. Samples at spacing `resolution`, refines the
/// argmax by a three-point parabola and fits the speed by least squares.
PeakTrack track_peak(const Trajectory& traj, const PeakWindow& window, double fit_from,
                     double fit_to, double resolution = 0.05);

struct RegimeParameters {
  double epsilon;
  double delta;
  bool outside_regime;
};

/// epsilon = 2A/3 and delta = sqrt(3)/wavelength; flagged when either is >= 0.1.
RegimeParameters regime_check(double amplitude, double wavelength);

/// Maps between dimensionless and physical variables for depth h (meters).
struct PhysicalUnits {
  double depth;
  double gravity;

  double elevation(double u) const;  // eta = 2h u / 3
  double position(double x) const;   // xi = x h / sqrt(3)
  double time(double t) const;       // tau = t sqrt(h / (3 g))
  double time_scale() const;         // sqrt(h / (3 g))
};

PhysicalUnits physical_units(double depth, double gravity = 9.8);

}  // namespace bouss
