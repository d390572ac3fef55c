#pragma once
// Cutoff selection, the ramped damping profile, initial-state preparation and
// the damped right-hand side of the Fourier-space system
//   U_t = i k V - d U,   V_t = i k U + 2 (U_x * U) + (i k)^3 U,   k = pi j / L.

#include <vector>

#include "bouss/spectral.hpp"

namespace bouss {

/// floor(L/pi). Throws ConfigError for L <= pi.
int default_mode_count(double L);

/// 0 below 0, x^4 (x-2)^4 on [0,1], 1 above 1.
double smooth_step(double x);

struct DampingProfile {
  double d0 = 0.0;
  int ramp = 0;                // Nd
  std::vector<double> values;  // slot j + N

  int modes() const noexcept { return static_cast<int>(values.size() / 2); }
  double operator()(int j) const { return values[static_cast<std::size_t>(j + modes())]; }
};

/// Plateau d0 at both ends of the window, zero in the interior, smooth-step
/// ramps of width Nd. Requires 0 < Nd < N and d0 >= 0.
DampingProfile damping_profile(int N, double d0, int Nd);
/// All-zero profile.
DampingProfile no_damping(int N);

enum class ProductMethod { dealiased, direct };

struct SchemeConfig {
  double L = 200.0;
  int N = 0;  // 0 selects floor(L/pi)
  double d0 = 10.0;
  int Nd = 0;  // 0 selects max(1, N/8)
  bool damping_enabled = true;
  double dt = 0.1;
  double t_final = 0.0;
  ProductMethod product = ProductMethod::dealiased;

  /// Copy with N and Nd defaults filled in. Does not validate.
  SchemeConfig resolved() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
  PeriodicGrid grid() const;
  DampingProfile damping() const;
};

struct SpectralState {
  double t = 0.0;
  std::vector<cplx> u_hat;
  std::vector<cplx> v_hat;
};

/// Builds the initial state from u(x,0) and u_t(x,0). v0 is the trapezoid
/// running integral of u1, which must have zero mean to 1e-8 L max|u1|
/// (DataError otherwise).
SpectralState prepare_initial_state(const PhysicalField& u0, const PhysicalField& u1);
/// Same, with v0 = int_{-L}^x u1 supplied directly.
SpectralState prepare_initial_state_from_antiderivative(const PhysicalField& u0,
                                                        const PhysicalField& v0);

/// Evaluates the time derivative of a SpectralState. Holds scratch buffers
/// and, for the dealiased product, FFTW plans, so an instance is not
/// thread-safe.
class BoussinesqRhs {
 public:
  struct Options {
    ProductMethod product = ProductMethod::dealiased;
    bool nonlinear = true;
    // Project the derivative onto conjugate-symmetric form with slot -N zeroed.
    bool enforce_reality = true;
  };

  BoussinesqRhs(const PeriodicGrid& grid, DampingProfile damping, Options opts);
  BoussinesqRhs(const PeriodicGrid& grid, DampingProfile damping);

  void operator()(const SpectralState& s, SpectralState& ds);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const DampingProfile& damping() const noexcept { return damping_; }

 private:
  PeriodicGrid grid_;
  DampingProfile damping_;
  Options opts_;
  std::vector<double> k_;
  std::vector<cplx> ux_;
  std::vector<cplx> prod_;
  DealiasedProduct fast_;
};

}  // namespace bouss
