#pragma once
// Direct scattering for the Lax pair of the bad Boussinesq equation: the
// exponents l_j, z_j, the potential matrix, the Jost-type solutions X and Y,
// the spectral matrix s(k), the soliton zero k0 and its norming constant.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bouss/spectral.hpp"
#include "bouss/waves.hpp"

namespace bouss {

using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

/// exp(2 pi i / 3).
cplx omega();

struct LaxExponents {
  cplx k;
  std::array<cplx, 3> l;  // l_1, l_2, l_3
  std::array<cplx, 3> z;

  /// (l2 - l1) x + (z2 - z1) t.
  cplx theta21(double x, double t) const { return (l[1] - l[0]) * x + (z[1] - z[0]) * t; }
};

/// Throws DomainError at k = 0.
LaxExponents lax_exponents(cplx k);

/// Rows (1, l_j), (l_j), (l_j^2); singular where k^6 = 1.
Mat3 vandermonde(const LaxExponents& e);

struct PotentialSampler {
  Profile u0;
  Profile u0x;
  Profile v0;  // int_{-inf}^x u_t(x', 0) dx'
  double R = 60.0;

  /// Picks the smallest R (multiple of `granularity`, at least r_min) with
  /// max(|u0|, |v0|) < tail_tol beyond it, capped at r_max.
  static PotentialSampler from_profile(const InitialProfile& p, double tail_tol = 1e-14,
                                       double r_min = 60.0, double r_max = 400.0,
                                       double granularity = 5.0);
  static PotentialSampler zero(double R = 60.0);
};

/// P^{-1} M(x) P with M zero except for its bottom row
/// (-u0x/4 - i v0/(4 sqrt 3), -u0/2, 0). Throws DomainError when P is singular.
Mat3 potential_matrix(double x, cplx k, const PotentialSampler& p);

/// Matrix-valued solution stored on the uniform nodes x_n = start + n * step.
struct MatrixSolution {
  cplx k;
  double start = 0.0;
  double step = 0.0;  // negative for backward marches
  std::vector<Mat3> values;
  double growth = 0.0;  // max |entry| seen in the surviving columns
  // Bit j set when column j overflowed or passed the growth limit; its
  // entries are NaN from then on.
  unsigned lost_columns = 0;
  double growth_at_loss = 0.0;

  double node(std::size_t n) const { return start + static_cast<double>(n) * step; }
  /// Value at the node closest to x; throws DomainError if x is off-node.
  const Mat3& at(double x) const;
};

/// X_x = [L, X] + U X marched backward from X(R) = I.
MatrixSolution solve_X(cplx k, const PotentialSampler& p, double step = 0.05);
/// Same equation marched forward from Y(-R) = I.
MatrixSolution solve_Y(cplx k, const PotentialSampler& p, double step = 0.05);

/// Max over `samples` interior nodes of the discrepancy between the stored
/// solution and its Volterra integral form evaluated by composite Simpson.
/// Entry (i,j) is measured as |difference| / max(1, |X_ij|).
double integral_equation_residual(const MatrixSolution& sol, const PotentialSampler& p,
                                  int samples = 10);

struct ScatteringOptions {
  double step = 0.05;
  // Refinement stops once every entry moves by less than tolerance * max(1, |s_ij|).
  double tolerance = 1e-8;
  int max_refinements = 5;
  double growth_limit = 1e100;
};

struct ScatteringResult {
  cplx k;
  Mat3 s;
  cplx r1;
  bool near_zero = false;  // |s11| < 1e-12, r1 left at 0
  double R = 0.0;
  double step = 0.0;
  double refinement_change = 0.0;  // entrywise, relative above unit size
  double identity_residual = 0.0;  // s against e^{RL} X(-R) e^{-RL}, same measure
  double growth = 0.0;
  unsigned lost_columns = 0;  // columns of s left as NaN, see MatrixSolution
};

/// s at one fixed x-step, no refinement. Columns whose solve overflows are
/// NaN (r1 too when column 2 is lost); throws ConditioningError only when
/// every column is lost.
ScatteringResult scattering_matrix_fixed(cplx k, const PotentialSampler& p, double step,
                                         double growth_limit = 1e100);
/// s with the x-step halved until two successive results agree to tolerance.
/// Throws ConditioningError if the solve overflows or does not settle.
ScatteringResult scattering_matrix(cplx k, const PotentialSampler& p,
                                   const ScatteringOptions& opts = {});

/// Bisection on a sign change followed by secant steps. Requires
/// f(lo) f(hi) <= 0.
double find_real_root(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-10, int max_iter = 200);

struct ZeroSearch {
  bool found = false;  // false means solitonless on the interval
  double k0 = 0.0;
  cplx s11_at_root;
  double s11_phase = 0.0;  // arg of s11 just above the root
  int evaluations = 0;
  std::vector<std::string> notes;
};

/// Looks for a zero of s11 on the real interval [lo, hi] (lo > 1) by scanning
/// `scan` sub-intervals for a sign change of Re s11, bisecting, and polishing
/// with complex secant steps restricted to the real axis.
ZeroSearch find_k0(const PotentialSampler& p, double lo, double hi,
                   const ScatteringOptions& opts = {}, int scan = 16, double tol = 1e-10);
/// Same, with s11 supplied directly (useful for stubs).
ZeroSearch find_k0(const std::function<cplx(double)>& s11, double lo, double hi, int scan = 16,
                   double tol = 1e-10);

struct NormingSample {
  double x;
  int component;  // 1-based
  cplx value;      // e^{-(l1-l2)x} [Y]_{i2} / (sdot22A [X]_{i1})
  cplx corrected;  // same after removing the adj(s)_22 and adj(s)_32 admixtures
};

struct NormingConstant {
  cplx value;                    // mean of the corrected samples
  cplx raw_mean;                 // mean of the uncorrected samples
  double spread = 0.0;           // max relative deviation of the uncorrected samples
  double corrected_spread = 0.0;
  cplx sdot22A;                  // d/dk of (adj s)_22 at k0
  cplx adj22;                    // (adj s)_22 and (adj s)_32 at k0
  cplx adj32;
  std::vector<NormingSample> samples;
};

struct NormingOptions {
  std::vector<double> x_points{-5.0, 0.0, 5.0};
  // Components whose |[X]_{i1}| falls below this fraction of the column's
  // largest entry are skipped.
  double relative_floor = 0.05;
  double max_spread = 1e-4;
  double rel_step = 1e-6;
};

/// c_{k0} from [Y]_2 / sdot22A = c e^{(l1 - l2) x} [X]_1. Throws DataError
/// if the uncorrected samples disagree by more than max_spread.
NormingConstant norming_constant(double k0, const PotentialSampler& p,
                                 const ScatteringOptions& sopts = {},
                                 const NormingOptions& nopts = {});

}  // namespace bouss
