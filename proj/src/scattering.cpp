#include "bouss/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "bouss/errors.hpp"

namespace bouss {

namespace {

constexpr cplx I{0.0, 1.0};
const double kSqrt3 = std::sqrt(3.0);


bool finite(const Vec3& v) {
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Largest entrywise |a - b| / max(1, |b|) over entries finite in both. Off the
// unit circle some entries of X and s grow exponentially with R, so only this
// mixed measure is meaningful.
double mixed_change(const Mat3& a, const Mat3& b) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (finite(a(i, j)) && finite(b(i, j)))
        worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(1.0, std::abs(b(i, j))));
  return worst;
}

// The potential is rank one: U(x) = a * (alpha(x) r0 + beta(x) r1)^T with
// a = P^{-1} e3 and r0, r1 the first two rows of P.
struct RankOnePotential {
  RankOnePotential(cplx k, const PotentialSampler& p) : ex(lax_exponents(k)), sampler(&p) {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const double scale = std::max({1.0, std::abs(ex.l[i]), std::abs(ex.l[j])});
        if (std::abs(ex.l[i] - ex.l[j]) < 1e-10 * scale) {
          std::ostringstream msg;
          msg << "P(k) is singular at k = " << k << " (coincident exponents l_" << i + 1
              << " = l_" << j + 1 << ")";
          throw DomainError(msg.str());
        }
      }
    P = vandermonde(ex);
    a = P.partialPivLu().solve(Vec3(0.0, 0.0, 1.0));
    for (int j = 0; j < 3; ++j) {
      r0(j) = P(0, j);
      r1(j) = P(1, j);
    }
  }

  // Row vector alpha r0 + beta r1 at x.
  Eigen::RowVector3cd row(double x) const {
    const double u = sampler->u0(x), ux = sampler->u0x(x), v = sampler->v0(x);
    const cplx alpha = -ux / 4.0 - I * v / (4.0 * kSqrt3);
    const cplx beta = -u / 2.0;
    return alpha * r0 + beta * r1;
  }

  LaxExponents ex;
  const PotentialSampler* sampler;
  Mat3 P;
  Vec3 a;
  Eigen::RowVector3cd r0, r1;
};

struct MarchResult {
  MatrixSolution sol;
  Mat3 S = Mat3::Zero();  // int_{start}^{end} e^{-xL} U X e^{xL} dx
};

// RK4 on X' = [L, X] + U X together with S' = e^{-xL} U X e^{xL}. The columns
// of X evolve independently; a column that overflows or passes the growth
// limit is dropped (set to NaN) while the others continue.
MarchResult march(cplx k, const PotentialSampler& p, double from, double to, double step,
                  bool with_integral, double growth_limit) {
  if (!(step > 0.0)) throw ConfigError("scattering step must be positive");
  if (!(p.R > 0.0)) throw ConfigError("truncation radius must be positive");
  const RankOnePotential pot(k, p);
  const auto& l = pot.ex.l;
  const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(std::abs(to - from) / step)));
  const double h = (to - from) / static_cast<double>(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::array<bool, 3> alive{true, true, true};
  auto rhs = [&](double x, const Mat3& X, Mat3& dX, Mat3* dS) {
    const Eigen::RowVector3cd b = pot.row(x);
    std::array<cplx, 3> e{};
    if (dS)
      for (int i = 0; i < 3; ++i) e[i] = std::exp(x * l[i]);
    for (int j = 0; j < 3; ++j) {
      if (!alive[j]) continue;
      const cplx bx = b * X.col(j);
      for (int i = 0; i < 3; ++i) {
        dX(i, j) = (l[i] - l[j]) * X(i, j) + pot.a(i) * bx;
        if (dS) (*dS)(i, j) = pot.a(i) * bx * e[j] / e[i];
      }
    }
  };

  MarchResult out;
  out.sol.k = k;
  out.sol.start = from;
  out.sol.step = h;
  out.sol.values.reserve(n + 1);
  Mat3 X = Mat3::Identity();
  out.sol.values.push_back(X);
  double growth = 1.0;

  Mat3 k1, k2, k3, k4, s1, s2, s3, s4;
  for (Mat3* m : {&k1, &k2, &k3, &k4, &s1, &s2, &s3, &s4}) m->setZero();
  Mat3* q1 = with_integral ? &s1 : nullptr;
  Mat3* q2 = with_integral ? &s2 : nullptr;
  Mat3* q3 = with_integral ? &s3 : nullptr;
  Mat3* q4 = with_integral ? &s4 : nullptr;
  for (std::size_t m = 0; m < n; ++m) {
    const double x = from + static_cast<double>(m) * h;
    rhs(x, X, k1, q1);
    rhs(x + 0.5 * h, X + 0.5 * h * k1, k2, q2);
    rhs(x + 0.5 * h, X + 0.5 * h * k2, k3, q3);
    rhs(x + h, X + h * k3, k4, q4);
    X += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
    if (with_integral) out.S += (h / 6.0) * (s1 + 2.0 * (s2 + s3) + s4);
    for (int j = 0; j < 3; ++j) {
      if (!alive[j]) continue;
      const double big = X.col(j).cwiseAbs().maxCoeff();
      if (!finite(Vec3(X.col(j))) || !(big <= growth_limit) ||
          (with_integral && !finite(Vec3(out.S.col(j))))) {
        alive[j] = false;
        X.col(j).setConstant(cplx{nan, nan});
        out.S.col(j).setConstant(cplx{nan, nan});
        out.sol.lost_columns |= 1u << j;
        out.sol.growth_at_loss = std::max(out.sol.growth_at_loss, big);
        continue;
      }
      growth = std::max(growth, big);
    }
    if (!alive[0] && !alive[1] && !alive[2]) {
      std::ostringstream msg;
      msg << "scattering solve at k = " << k << " overflowed in every column near x = " << x + h;
      throw ConditioningError(msg.str(), out.sol.growth_at_loss);
    }
    out.sol.values.push_back(X);
  }
  out.sol.growth = growth;
  return out;
}

}  // namespace

cplx omega() { return {-0.5, std::sqrt(3.0) / 2.0}; }

LaxExponents lax_exponents(cplx k) {
  if (k == cplx{}) throw DomainError("Lax exponents are undefined at k = 0");
  LaxExponents e{k, {}, {}};
  const std::array<cplx, 3> powers{omega(), std::conj(omega()), cplx{1.0, 0.0}};
  for (int j = 0; j < 3; ++j) {
    const cplx wk = powers[j] * k;
    const cplx inv = 1.0 / wk;
    e.l[j] = I * (wk + inv) / (2.0 * kSqrt3);
    e.z[j] = I * (wk * wk + inv * inv) / (4.0 * kSqrt3);
  }
  return e;
}

Mat3 vandermonde(const LaxExponents& e) {
  Mat3 P;
  for (int j = 0; j < 3; ++j) {
    P(0, j) = 1.0;
    P(1, j) = e.l[j];
    P(2, j) = e.l[j] * e.l[j];
  }
  return P;
}

PotentialSampler PotentialSampler::from_profile(const InitialProfile& prof, double tail_tol,
                                                double r_min, double r_max, double granularity) {
  if (!prof.u0 || !prof.u0x || !prof.v0) throw ConfigError("profile lacks u0, u0x or v0");
  auto tail = [&](double R) {
    double worst = 0.0;
    for (double x = R; x <= 1.5 * r_max; x += 0.25)
      worst = std::max({worst, std::abs(prof.u0(x)), std::abs(prof.v0(x)),
                        std::abs(prof.u0(-x)), std::abs(prof.v0(-x))});
    return worst;
  };
  double R = r_min;
  while (R < r_max && !(tail(R) < tail_tol)) R += granularity;
  return {prof.u0, prof.u0x, prof.v0, std::min(R, r_max)};
}

PotentialSampler PotentialSampler::zero(double R) {
  auto z = [](double) { return 0.0; };
  return {z, z, z, R};
}

Mat3 potential_matrix(double x, cplx k, const PotentialSampler& p) {
  const RankOnePotential pot(k, p);
  return pot.a * pot.row(x);
}

const Mat3& MatrixSolution::at(double x) const {
  const double pos = (x - start) / step;
  const long long n = std::llround(pos);
  if (n < 0 || static_cast<std::size_t>(n) >= values.size() ||
      std::abs(node(static_cast<std::size_t>(n)) - x) > 1e-9 * std::max(1.0, std::abs(x))) {
    std::ostringstream msg;
    msg << "x = " << x << " is not a node of the stored solution";
    throw DomainError(msg.str());
  }
  return values[static_cast<std::size_t>(n)];
}

MatrixSolution solve_X(cplx k, const PotentialSampler& p, double step) {
  return march(k, p, p.R, -p.R, step, false, 1e100).sol;
}

MatrixSolution solve_Y(cplx k, const PotentialSampler& p, double step) {
  return march(k, p, -p.R, p.R, step, false, 1e100).sol;
}

double integral_equation_residual(const MatrixSolution& sol, const PotentialSampler& p,
                                  int samples) {
  const RankOnePotential pot(sol.k, p);
  const auto& l = pot.ex.l;
  const std::size_t last = sol.values.size() - 1;
  if (last < 4 || samples < 1) return 0.0;

  double worst = 0.0;
  for (int s = 1; s <= samples; ++s) {
    std::size_t n = last * static_cast<std::size_t>(s) / static_cast<std::size_t>(samples + 1);
    n -= n % 2;
    if (n < 2) continue;
    const double x = sol.node(n);
    // Integrand (x - x') weighted: e^{(x-x')(l_i - l_j)} (U X)_{ij}(x').
    Mat3 acc = Mat3::Zero();
    for (std::size_t m = 0; m <= n; ++m) {
      const double xp = sol.node(m);
      const Eigen::RowVector3cd bx = pot.row(xp) * sol.values[m];
      const double w = (m == 0 || m == n) ? 1.0 : (m % 2 == 1 ? 4.0 : 2.0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          acc(i, j) += w * std::exp((x - xp) * (l[i] - l[j])) * pot.a(i) * bx(j);
    }
    // Signed step makes this I - int_x^R for X and I + int_{-R}^x for Y.
    const Mat3 volterra = Mat3::Identity() + (sol.step / 3.0) * acc;
    worst = std::max(worst, mixed_change(volterra, sol.values[n]));
  }
  return worst;
}

ScatteringResult scattering_matrix_fixed(cplx k, const PotentialSampler& p, double step,
                                         double growth_limit) {
  auto run = march(k, p, p.R, -p.R, step, true, growth_limit);
  ScatteringResult r;
  r.k = k;
  // Marching from R down to -R accumulates minus the integral over [-R, R].
  r.s = Mat3::Identity() + run.S;
  r.R = p.R;
  r.step = step;
  r.growth = run.sol.growth;
  r.lost_columns = run.sol.lost_columns;

  const auto& l = lax_exponents(k).l;
  const Mat3& Xend = run.sol.values.back();
  Mat3 via_x;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) via_x(i, j) = std::exp(p.R * (l[i] - l[j])) * Xend(i, j);
  r.identity_residual = mixed_change(via_x, r.s);

  if (!finite(r.s(0, 0)) || !finite(r.s(0, 1))) {
    r.r1 = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
  } else if (std::abs(r.s(0, 0)) < 1e-12) {
    r.near_zero = true;
    r.r1 = 0.0;
  } else {
    r.r1 = r.s(0, 1) / r.s(0, 0);
  }
  return r;
}

ScatteringResult scattering_matrix(cplx k, const PotentialSampler& p,
                                   const ScatteringOptions& opts) {
  double h = opts.step;
  ScatteringResult prev = scattering_matrix_fixed(k, p, h, opts.growth_limit);
  double change = 0.0;
  for (int it = 0; it < opts.max_refinements; ++it) {
    h *= 0.5;
    ScatteringResult cur = scattering_matrix_fixed(k, p, h, opts.growth_limit);
    change = mixed_change(cur.s, prev.s);
    cur.refinement_change = change;
    if (change <= opts.tolerance) return cur;
    prev = std::move(cur);
  }
  std::ostringstream msg;
  msg << "s(k) at k = " << k << " did not settle under step refinement (last change " << change
      << ")";
  throw ConditioningError(msg.str(), prev.growth);
}

double find_real_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iter) {
  double a = lo, b = hi, fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw DomainError("find_real_root: no sign change on bracket");
  bool secant_turn = true;
  for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
    double x = 0.5 * (a + b);
    if (secant_turn) {
      const double xs = b - fb * (b - a) / (fb - fa);
      if (xs > std::min(a, b) && xs < std::max(a, b)) x = xs;
    }
    secant_turn = !secant_turn;
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }
  return std::abs(fa) < std::abs(fb) ? a : b;
}

ZeroSearch find_k0(const std::function<cplx(double)>& s11, double lo, double hi, int scan,
                   double tol) {
  if (!(hi > lo)) throw ConfigError("find_k0: empty interval");
  if (scan < 1) scan = 1;
  ZeroSearch out;
  auto counted = [&](double k) {
    ++out.evaluations;
    return s11(k);
  };

  std::vector<double> ks(static_cast<std::size_t>(scan) + 1);
  std::vector<cplx> vals(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ks[i] = lo + (hi - lo) * static_cast<double>(i) / scan;
    vals[i] = counted(ks[i]);
  }

  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const double ra = vals[i].real(), rb = vals[i + 1].real();
    if ((ra > 0.0) == (rb > 0.0) && ra != 0.0 && rb != 0.0) continue;

    double k = find_real_root([&](double q) { return counted(q).real(); }, ks[i], ks[i + 1],
                              std::max(tol, 1e-3 * (ks[i + 1] - ks[i])));
    // Polish with secant steps on the complex function, keeping k real.
    double kprev = k + 1e-6 * std::max(1.0, std::abs(k));
    cplx fprev = counted(kprev), fk = counted(k);
    for (int it = 0; it < 50; ++it) {
      const cplx denom = fk - fprev;
      if (denom == cplx{}) break;
      const double next = k - (fk * (k - kprev) / denom).real();
      if (!(next >= ks[i] && next <= ks[i + 1])) break;
      kprev = k;
      fprev = fk;
      k = next;
      fk = counted(k);
      if (std::abs(k - kprev) < tol) break;
    }
    const double scale = std::max(std::abs(vals[i]), std::abs(vals[i + 1]));
    if (std::abs(fk) <= 1e-6 * scale) {
      out.found = true;
      out.k0 = k;
      out.s11_at_root = fk;
      const cplx above = counted(k + 1e-4 * std::max(1.0, std::abs(k)));
      out.s11_phase = std::arg(above);
      if (std::abs(std::sin(out.s11_phase)) > 1e-6) {
        std::ostringstream note;
        note << "s11 is not real on the interval: phase " << out.s11_phase << " next to the zero";
        out.notes.push_back(note.str());
      }
      return out;
    }
    std::ostringstream note;
    note << "Re s11 changes sign on [" << ks[i] << ", " << ks[i + 1]
         << "] without a zero of s11 (|s11| = " << std::abs(fk) << ")";
    out.notes.push_back(note.str());
  }
  return out;
}

ZeroSearch find_k0(const PotentialSampler& p, double lo, double hi, const ScatteringOptions& opts,
                   int scan, double tol) {
  if (!(lo > 1.0)) throw DomainError("right-moving soliton zeros lie in (1, inf); need lo > 1");
  // Settle the step once so that s11 is a smooth function of k during the search.
  const double step = scattering_matrix(0.5 * (lo + hi), p, opts).step;
  auto s11 = [&](double k) {
    const cplx v = scattering_matrix_fixed(k, p, step, opts.growth_limit).s(0, 0);
    if (!finite(v)) {
      std::ostringstream msg;
      msg << "s11 could not be computed at k = " << k;
      throw ConditioningError(msg.str(), opts.growth_limit);
    }
    return v;
  };
  return find_k0(s11, lo, hi, scan, tol);
}

NormingConstant norming_constant(double k0, const PotentialSampler& p,
                                 const ScatteringOptions& sopts, const NormingOptions& nopts) {
  const double step = scattering_matrix(k0, p, sopts).step;
  auto adj22 = [&](double k) {
    const Mat3 s = scattering_matrix_fixed(k, p, step, sopts.growth_limit).s;
    const cplx v = s(0, 0) * s(2, 2) - s(0, 2) * s(2, 0);
    if (!finite(v)) throw ConditioningError("(adj s)_22 could not be computed near k0", sopts.growth_limit);
    return v;
  };
  const double h = nopts.rel_step * std::abs(k0);
  const cplx d1 = (adj22(k0 + h) - adj22(k0 - h)) / (2.0 * h);
  const cplx d2 = (adj22(k0 + 0.5 * h) - adj22(k0 - 0.5 * h)) / h;
  const cplx sdot = (4.0 * d2 - d1) / 3.0;
  if (sdot == cplx{}) throw DataError("d/dk (adj s)_22 vanishes at k0; zero is not simple");

  const auto X = solve_X(k0, p, step);
  const auto Y = solve_Y(k0, p, step);
  const auto ex = lax_exponents(k0);

  // Y e^{xL} = X e^{xL} adj(s) column by column, so [Y]_2 picks up the
  // columns 2 and 3 of X weighted by adj(s)_22 and adj(s)_32. Both vanish for
  // exact data at a zero; numerically adj(s)_32 does not, so it is removed.
  const Mat3 s0 = scattering_matrix_fixed(k0, p, step, sopts.growth_limit).s;
  const cplx adj22v = s0(0, 0) * s0(2, 2) - s0(0, 2) * s0(2, 0);
  const cplx adj32v = s0(0, 1) * s0(2, 0) - s0(0, 0) * s0(2, 1);
  const bool can_correct = finite(adj22v) && finite(adj32v);

  NormingConstant out;
  out.sdot22A = sdot;
  out.adj22 = adj22v;
  out.adj32 = adj32v;
  for (double x : nopts.x_points) {
    const Mat3& Xx = X.at(x);
    const Mat3& Yx = Y.at(x);
    const Vec3 col = Xx.col(0);
    const double big = col.cwiseAbs().maxCoeff();
    const cplx scale = std::exp(-(ex.l[0] - ex.l[1]) * x) / sdot;
    for (int i = 0; i < 3; ++i) {
      const double mag = std::abs(col(i));
      if (mag < 1e-8 || mag < nopts.relative_floor * big) continue;
      const cplx raw = scale * Yx(i, 1) / col(i);
      cplx fixed = raw;
      if (can_correct) {
        const cplx other = adj22v * Xx(i, 1) + adj32v * std::exp((ex.l[2] - ex.l[1]) * x) * Xx(i, 2);
        fixed = scale * (Yx(i, 1) - other) / col(i);
      }
      out.samples.push_back({x, i + 1, raw, fixed});
    }
  }
  if (out.samples.empty()) throw DataError("no usable components for the norming constant");

  auto mean_and_spread = [&](auto pick) {
    cplx mean{};
    for (const auto& smp : out.samples) mean += pick(smp);
    mean /= static_cast<double>(out.samples.size());
    double spread = 0.0;
    for (const auto& smp : out.samples) spread = std::max(spread, std::abs(pick(smp) - mean));
    return std::pair{mean, spread / std::abs(mean)};
  };
  std::tie(out.raw_mean, out.spread) = mean_and_spread([](const NormingSample& v) { return v.value; });
  std::tie(out.value, out.corrected_spread) =
      mean_and_spread([](const NormingSample& v) { return v.corrected; });
  if (!can_correct) out.corrected_spread = std::numeric_limits<double>::quiet_NaN();

  if (out.spread > nopts.max_spread) {
    std::ostringstream msg;
    msg << "norming constant samples disagree: relative spread " << out.spread;
    throw DataError(msg.str());
  }
  return out;
}

}  // namespace bouss
