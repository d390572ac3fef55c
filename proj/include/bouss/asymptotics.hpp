#pragma once
// Long-time ingredients: the stationary points k2, k4 and z2*, the amplitude
// A2, soliton phase shifts, the arc integral delta, and the soliton asymptote
// u_sol that dominates to the right of x = t.

#include <functional>
#include <map>
#include <optional>

#include "bouss/scattering.hpp"

namespace bouss {

struct SectorPoint {
  double zeta;
  cplx k2;
  cplx k4;  // unit modulus for zeta < 1, real for zeta >= 1
  cplx z2_star;
};

/// Throws DomainError for negative or non-finite zeta and when the branch
/// condition -i w^2 k2 z2* > 0 cannot be met.
SectorPoint sector_point(double zeta);

/// (w^2 - k^2) / (1 - w^2 k^2). DomainError at its poles.
cplx rtilde(cplx k);

/// Spectral data at a complex k, typically a scattering_matrix call.
using SpectralFn = std::function<ScatteringResult(cplx)>;

struct AmplitudeA2 {
  double zeta;
  double nu;  // nu_2 >= 0 after clipping
  double A2;
  bool clipped = false;
};

/// Throws DataError when the log argument is not positive or nu_2 < -1e-10.
AmplitudeA2 amplitude_A2(double zeta, const SpectralFn& spectral);
AmplitudeA2 amplitude_A2(double zeta, const PotentialSampler& p, const ScatteringOptions& opts = {});

/// (k - w^2 k0)(k - w/k0) / ((k - w k0)(k - w^2/k0)).
cplx soliton_factor(cplx k, double k0);
/// arg( P(w k) / P(w^2 k) ) in (-pi, pi]; zero when there is no soliton.
double phase_shift(cplx k, std::optional<double> k0);
/// The two corrections that enter the dispersive cosines.
double phase_shift_k4(double zeta, std::optional<double> k0);  // arg P(w k4)/P(w^2 k4)
double phase_shift_k2(double zeta, std::optional<double> k0);  // arg P(w^2 k2)/P(w k2)

/// r1 at points of the unit circle.
using ReflectionFn = std::function<cplx(cplx)>;

struct DeltaOptions {
  int nodes_per_quarter = 64;
  double tolerance = 1e-9;
  int max_doublings = 6;
};

/// delta(k) = exp{ -1/(2 pi i) int_i^{k1} ln(1 + rtilde(s) |r1(s)|^2) / (s - k) ds }
/// along the unit circle counterclockwise from i to k1. The log values at the
/// quadrature nodes are computed once, so evaluating at many k is cheap.
class ArcDelta {
 public:
  /// Refines the arc rule until delta at each probe point moves by less than
  /// the tolerance. Throws DataError for a non-positive log argument and
  /// DomainError if k1 is off the unit circle.
  ArcDelta(cplx k1, const ReflectionFn& r1, std::span<const cplx> probes,
           const DeltaOptions& opts = {});

  cplx operator()(cplx k) const;
  /// hat Delta_33(k) = delta(w k)/delta(w^2 k) * delta(1/(w^2 k))/delta(1/(w k)).
  cplx delta33(cplx k) const;

  int nodes() const noexcept { return static_cast<int>(nodes_.size()); }
  double refinement_change() const noexcept { return change_; }
  /// Largest |ln(1 + rtilde |r1|^2)| met on the arc.
  double max_log() const noexcept { return max_log_; }

 private:
  void build(int panels, const ReflectionFn& r1);

  double theta0_ = 0.0;
  double theta1_ = 0.0;
  std::vector<cplx> nodes_;
  std::vector<cplx> weights_;  // ds at each node
  std::vector<double> logs_;
  double change_ = 0.0;
  double max_log_ = 0.0;
};

/// One-shot convenience wrapper around ArcDelta.
cplx delta_integral(cplx k, cplx k1, const ReflectionFn& r1, const DeltaOptions& opts = {});

/// r1 on the unit circle from a fixed-step scattering solve.
ReflectionFn reflection_on_circle(const PotentialSampler& p, double step);

using K1Provider = std::function<std::optional<cplx>(double zeta)>;

struct SolitonAsymptote {
  double k0 = 0.0;
  double A0 = 0.0;
  double c0 = 0.0;
  cplx c_k0;
  /// ln f_{k0}(zeta) for each zeta that has been evaluated.
  std::function<double(double)> ln_f;

  /// A0 sech^2( sqrt(A0/6) (x - c0 t) - ln f(zeta) ).
  double value(double x, double t, double ln_f_value) const;
  double value(double x, double t) const { return value(x, t, ln_f(x / t)); }
};

/// (3/8)(k0 - 1/k0)^2 and (k0 + 1/k0)/2.
double soliton_amplitude_from_zero(double k0);
double soliton_speed_from_zero(double k0);

/// Positive prefactor i w^2 (k0^2 - w^2) c_{k0} / (sqrt3 k0 (k0^2 - 1)).
cplx norming_prefactor(double k0, cplx c_k0);

/// ln f from the prefactor and the two delta ratios; throws DataError when
/// f^2 is not real positive to `rel_tol`.
double ln_f_value(double k0, cplx c_k0, const ArcDelta& delta, double rel_tol = 1e-6);

/// Builds u_sol. The k1 provider is consulted per zeta; a missing k1 raises
/// MissingInputError when ln f is evaluated. Arc integrals are cached by k1.
SolitonAsymptote soliton_asymptote(double k0, cplx c_k0, const ReflectionFn& r1,
                                   K1Provider k1_provider, const DeltaOptions& opts = {},
                                   double rel_tol = 1e-6);

}  // namespace bouss
