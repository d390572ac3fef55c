#include "bouss/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "bouss/errors.hpp"

namespace bouss {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);

cplx w() { return omega(); }
cplx w2() { return std::conj(omega()); }

}  // namespace

SectorPoint sector_point(double zeta) {
  if (!(zeta >= 0.0) || !std::isfinite(zeta))
    throw DomainError("sector_point needs a finite zeta >= 0");
  const double root = std::sqrt(8.0 + zeta * zeta);
  const cplx k2 = (zeta - root - I * kSqrt2 * std::sqrt(4.0 - zeta * zeta + zeta * root)) / 4.0;
  const cplx k4 =
      (zeta + root - kSqrt2 * std::sqrt(cplx{-4.0 + zeta * zeta + zeta * root, 0.0})) / 4.0;

  const cplx inner = -w2() * (4.0 - 3.0 * k2 * zeta - k2 * k2 * k2 * zeta) / (4.0 * std::pow(k2, 4));
  cplx z2 = kSqrt2 * std::polar(1.0, kPi / 4.0) * std::sqrt(inner);
  cplx q = -I * w2() * k2 * z2;
  if (q.real() < 0.0) {
    z2 = -z2;
    q = -q;
  }
  if (!(q.real() > 0.0) || std::abs(q.imag()) > 1e-8 * std::abs(q)) {
    std::ostringstream msg;
    msg << "no branch of z2* makes -i w^2 k2 z2* positive at zeta = " << zeta;
    throw DomainError(msg.str());
  }
  return {zeta, k2, k4, z2};
}

cplx rtilde(cplx k) {
  const cplx den = 1.0 - w2() * k * k;
  if (std::abs(den) < 1e-14) throw DomainError("rtilde evaluated at a pole");
  return (w2() - k * k) / den;
}

AmplitudeA2 amplitude_A2(double zeta, const SpectralFn& spectral) {
  const SectorPoint sp = sector_point(zeta);
  const cplx a = w2() * sp.k2;  // w^2 k2
  const cplx b = w() * sp.k2;   // w k2
  const ScatteringResult sa = spectral(a);
  const ScatteringResult sb = spectral(b);
  const double s11b = std::abs(sb.s(0, 0));
  if (s11b == 0.0) throw DataError("s11(w k2) vanishes; amplitude undefined");

  const cplx r1 = sa.r1;
  const cplx arg = (1.0 + rtilde(a) * std::norm(r1)) * std::norm(sa.s(0, 0)) / (s11b * s11b);
  if (!(arg.real() > 0.0) || std::abs(arg.imag()) > 1e-8 * std::abs(arg)) {
    std::ostringstream msg;
    msg << "log argument for nu_2 is not positive at zeta = " << zeta << ": " << arg;
    throw DataError(msg.str());
  }
  AmplitudeA2 out{zeta, -std::log(arg.real()) / (2.0 * kPi), 0.0, false};
  constexpr double tol = 1e-10;
  if (out.nu < -tol) {
    std::ostringstream msg;
    msg << "nu_2 = " << out.nu << " is negative at zeta = " << zeta;
    throw DataError(msg.str());
  }
  if (out.nu < tol) {
    out.clipped = out.nu != 0.0;
    out.nu = std::max(out.nu, 0.0);
  }
  const double denom = (-I * w2() * sp.k2 * sp.z2_star).real();
  const double scale = std::sqrt(std::abs(rtilde(1.0 / sp.k2)));
  out.A2 = -4.0 * kSqrt3 * std::sqrt(out.nu) * scale * sp.k2.imag() / denom * std::sin(std::arg(a));
  return out;
}

AmplitudeA2 amplitude_A2(double zeta, const PotentialSampler& p, const ScatteringOptions& opts) {
  return amplitude_A2(zeta, [&](cplx k) { return scattering_matrix(k, p, opts); });
}

cplx soliton_factor(cplx k, double k0) {
  const cplx den = (k - w() * k0) * (k - w2() / k0);
  if (std::abs(k - w() * k0) < 1e-10 || std::abs(k - w2() / k0) < 1e-10)
    throw DomainError("soliton factor evaluated at a pole");
  return (k - w2() * k0) * (k - w() / k0) / den;
}

double phase_shift(cplx k, std::optional<double> k0) {
  if (!k0) return 0.0;
  const cplx num = soliton_factor(w() * k, *k0);
  const cplx den = soliton_factor(w2() * k, *k0);
  if (std::abs(den) < 1e-10) throw DomainError("phase shift evaluated next to a zero of P");
  return std::arg(num / den);
}

double phase_shift_k4(double zeta, std::optional<double> k0) {
  return phase_shift(sector_point(zeta).k4, k0);
}

double phase_shift_k2(double zeta, std::optional<double> k0) {
  // arg P(w^2 k2)/P(w k2) is the conjugate-point form of phase_shift.
  if (!k0) return 0.0;
  const cplx k2 = sector_point(zeta).k2;
  const cplx num = soliton_factor(w2() * k2, *k0);
  const cplx den = soliton_factor(w() * k2, *k0);
  if (std::abs(den) < 1e-10) throw DomainError("phase shift evaluated next to a zero of P");
  return std::arg(num / den);
}

ArcDelta::ArcDelta(cplx k1, const ReflectionFn& r1, std::span<const cplx> probes,
                   const DeltaOptions& opts) {
  if (std::abs(std::abs(k1) - 1.0) > 1e-10) throw DomainError("k1 must lie on the unit circle");
  theta0_ = kPi / 2.0;
  theta1_ = std::arg(k1);
  while (theta1_ < theta0_ - 1e-14) theta1_ += 2.0 * kPi;
  if (theta1_ - theta0_ < 1e-12) return;  // empty arc

  const int base = static_cast<int>(std::ceil((theta1_ - theta0_) / (kPi / 2.0) - 1e-12));
  int panels = std::max(1, base * std::max(1, opts.nodes_per_quarter / 64));
  build(panels, r1);
  std::vector<cplx> prev(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) prev[i] = (*this)(probes[i]);
  if (probes.empty()) return;

  for (int d = 0; d < opts.max_doublings; ++d) {
    panels *= 2;
    build(panels, r1);
    change_ = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const cplx now = (*this)(probes[i]);
      change_ = std::max(change_, std::abs(now - prev[i]));
      prev[i] = now;
    }
    if (change_ < opts.tolerance) return;
  }
  std::ostringstream msg;
  msg << "arc quadrature for delta did not settle (last change " << change_ << ")";
  throw DataError(msg.str());
}

void ArcDelta::build(int panels, const ReflectionFn& r1) {
  using Rule = boost::math::quadrature::gauss<double, 64>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  nodes_.clear();
  weights_.clear();
  logs_.clear();
  max_log_ = 0.0;
  const double width = (theta1_ - theta0_) / panels;
  auto add = [&](double theta, double weight) {
    const cplx s = std::polar(1.0, theta);
    const cplx arg = 1.0 + rtilde(s) * std::norm(r1(s));
    if (!(arg.real() > 0.0) || std::abs(arg.imag()) > 1e-8 * std::abs(arg)) {
      std::ostringstream msg;
      msg << "log argument 1 + rtilde |r1|^2 = " << arg << " is not positive at s = " << s;
      throw DataError(msg.str());
    }
    const double lg = std::log(arg.real());
    max_log_ = std::max(max_log_, std::abs(lg));
    nodes_.push_back(s);
    weights_.push_back(I * s * weight);  // ds = i s dtheta
    logs_.push_back(lg);
  };
  for (int p = 0; p < panels; ++p) {
    const double mid = theta0_ + (p + 0.5) * width, half = 0.5 * width;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      add(mid + half * xs[i], half * ws[i]);
      add(mid - half * xs[i], half * ws[i]);
    }
  }
}

cplx ArcDelta::operator()(cplx k) const {
  cplx sum{};
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const cplx gap = nodes_[i] - k;
    if (std::abs(gap) < 1e-12) throw DomainError("delta evaluated on the integration arc");
    sum += logs_[i] * weights_[i] / gap;
  }
  return std::exp(-sum / (2.0 * kPi * I));
}

cplx ArcDelta::delta33(cplx k) const {
  return (*this)(w() * k) / (*this)(w2() * k) * (*this)(1.0 / (w2() * k)) / (*this)(1.0 / (w() * k));
}

cplx delta_integral(cplx k, cplx k1, const ReflectionFn& r1, const DeltaOptions& opts) {
  const cplx probe[] = {k};
  return ArcDelta(k1, r1, probe, opts)(k);
}

ReflectionFn reflection_on_circle(const PotentialSampler& p, double step) {
  return [p, step](cplx s) {
    const auto r = scattering_matrix_fixed(s, p, step);
    if (r.near_zero) throw DataError("s11 vanishes on the unit circle");
    return r.r1;
  };
}

double SolitonAsymptote::value(double x, double t, double lnf) const {
  const double ch = std::cosh(std::sqrt(A0 / 6.0) * (x - c0 * t) - lnf);
  return A0 / (ch * ch);
}

double soliton_amplitude_from_zero(double k0) {
  const double d = k0 - 1.0 / k0;
  return 0.375 * d * d;
}

double soliton_speed_from_zero(double k0) { return 0.5 * (k0 + 1.0 / k0); }

cplx norming_prefactor(double k0, cplx c_k0) {
  return I * w2() * (k0 * k0 - w2()) * c_k0 / (kSqrt3 * k0 * (k0 * k0 - 1.0));
}

double ln_f_value(double k0, cplx c_k0, const ArcDelta& delta, double rel_tol) {
  const cplx f2 = norming_prefactor(k0, c_k0) * delta.delta33(w2() * k0) / delta.delta33(w() * k0);
  if (!(f2.real() > 0.0) || std::abs(f2.imag()) > rel_tol * std::abs(f2)) {
    std::ostringstream msg;
    msg << "f_{k0}^2 = " << f2 << " is not real positive (relative tolerance " << rel_tol << ")";
    throw DataError(msg.str());
  }
  return 0.5 * std::log(f2.real());
}

SolitonAsymptote soliton_asymptote(double k0, cplx c_k0, const ReflectionFn& r1,
                                   K1Provider k1_provider, const DeltaOptions& opts,
                                   double rel_tol) {
  if (!(k0 > 1.0)) throw DomainError("soliton asymptote needs a zero k0 > 1");
  SolitonAsymptote out;
  out.k0 = k0;
  out.A0 = soliton_amplitude_from_zero(k0);
  out.c0 = soliton_speed_from_zero(k0);
  out.c_k0 = c_k0;

  struct Cache {
    std::mutex lock;
    std::vector<std::pair<cplx, std::shared_ptr<ArcDelta>>> arcs;
  };
  auto cache = std::make_shared<Cache>();
  const cplx ww = w(), ww2 = w2();
  out.ln_f = [=](double zeta) {
    const auto k1 = k1_provider ? k1_provider(zeta) : std::nullopt;
    if (!k1) {
      std::ostringstream msg;
      msg << "k1(zeta) is required for delta at zeta = " << zeta
          << " but was not supplied; it is not determined by the available data";
      throw MissingInputError(msg.str());
    }
    std::shared_ptr<ArcDelta> arc;
    {
      std::lock_guard g(cache->lock);
      for (auto& [key, val] : cache->arcs)
        if (std::abs(key - *k1) < 1e-14) arc = val;
    }
    if (!arc) {
      // The eight points at which delta33 samples delta.
      std::vector<cplx> probes;
      for (cplx k : {ww * k0, ww2 * k0})
        for (cplx q : {ww * k, ww2 * k, 1.0 / (ww2 * k), 1.0 / (ww * k)}) probes.push_back(q);
      arc = std::make_shared<ArcDelta>(*k1, r1, probes, opts);
      std::lock_guard g(cache->lock);
      cache->arcs.emplace_back(*k1, arc);
    }
    return ln_f_value(k0, c_k0, *arc, rel_tol);
  };
  return out;
}

}  // namespace bouss
