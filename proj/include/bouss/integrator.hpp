#pragma once
// Fixed-step classical RK4 in time, snapshot recording and reconstruction of
// the trigonometric interpolant from a state.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bouss/scheme.hpp"

namespace bouss {

using RhsFn = std::function<void(const SpectralState&, SpectralState&)>;

/// Raised when a step produces a non-finite coefficient or max|U^| > 1e12.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time, SpectralState last_finite)
      : std::runtime_error(what), time_(time), last_(std::move(last_finite)) {}
  /// Time the failing step would have reached.
  double time() const noexcept { return time_; }
  const SpectralState& last_finite() const noexcept { return last_; }

 private:
  double time_;
  SpectralState last_;
};

inline constexpr double kBlowUpThreshold = 1e12;

/// Reusable RK4 stepper; keeps the four stage buffers between calls.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(RhsFn rhs) : rhs_(std::move(rhs)) {}
  /// Advances s in place by dt. Throws BlowUpError leaving s untouched.
  void step(SpectralState& s, double dt);

 private:
  RhsFn rhs_;
  SpectralState k1_, k2_, k3_, k4_, tmp_;
};

SpectralState rk4_step(const SpectralState& s, double dt, const RhsFn& rhs);

struct Trajectory {
  std::vector<double> snapshot_times;
  std::vector<SpectralState> states;
  SchemeConfig config;
};

/// Called after every accepted step; useful for progress and online metrics.
using StepObserver = std::function<void(const SpectralState&)>;

/// Marches with step config.dt, shortening the last step before each
/// snapshot so that it lands exactly. An empty snapshot list records t_final
/// only. Throws ConfigError on unsorted or out-of-range snapshot times and
/// BlowUpError if the solution leaves representable range.
Trajectory simulate(const SchemeConfig& config, const SpectralState& initial,
                    std::vector<double> snapshot_times, const StepObserver& observer = {});
/// Same, with a caller-supplied right-hand side.
Trajectory simulate(const SchemeConfig& config, const SpectralState& initial,
                    std::vector<double> snapshot_times, const RhsFn& rhs,
                    const StepObserver& observer = {});

/// U(x, t) at arbitrary points of [-L, L].
std::vector<double> reconstruct(const PeriodicGrid& grid, const SpectralState& s,
                                std::span<const double> points);

}  // namespace bouss
