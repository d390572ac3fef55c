#include "bouss/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bouss/errors.hpp"
#include "fft.hpp"

namespace bouss {

namespace {

using detail::FftBuffer;

// Slot of index j in a length-m periodic buffer.
std::size_t wrap(int j, std::size_t m) {
  const auto mm = static_cast<long long>(m);
  return static_cast<std::size_t>(((j % mm) + mm) % mm);
}

double parity(int j) { return (j % 2 == 0) ? 1.0 : -1.0; }

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (!(a == b)) throw ConfigError("spectral fields live on different grids");
}

}  // namespace

PeriodicGrid::PeriodicGrid(double half_period, int modes) : L_(half_period), N_(modes) {
  if (!(half_period > 0.0) || !std::isfinite(half_period))
    throw ConfigError("half-period L must be a positive finite number");
  if (modes < 1) throw ConfigError("mode cutoff N must be at least 1");
}

double PeriodicGrid::wavenumber(int j) const noexcept { return std::numbers::pi * j / L_; }

std::vector<double> PeriodicGrid::points() const {
  std::vector<double> x(size());
  for (int j = -N_; j < N_; ++j) x[slot(j)] = point(j);
  return x;
}

PhysicalField::PhysicalField(PeriodicGrid g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw ConfigError("field has " + std::to_string(values.size()) + " samples, grid needs " +
                      std::to_string(grid.size()));
}

PhysicalField PhysicalField::sample(const PeriodicGrid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (int j = -g.modes(); j < g.modes(); ++j) v[g.slot(j)] = f(g.point(j));
  return {g, std::move(v)};
}

SpectralField::SpectralField(PeriodicGrid g) : grid(g), coeffs(g.size(), cplx{}) {}

SpectralField::SpectralField(PeriodicGrid g, std::vector<cplx> c) : grid(g), coeffs(std::move(c)) {
  if (coeffs.size() != grid.size())
    throw ConfigError("spectral field has " + std::to_string(coeffs.size()) +
                      " coefficients, grid needs " + std::to_string(grid.size()));
}

SpectralField forward_dft(const PhysicalField& f) {
  const int N = f.grid.modes();
  const std::size_t n = f.grid.size();
  FftBuffer fft(n);
  auto buf = fft.data();
  for (std::size_t m = 0; m < n; ++m) buf[m] = f.values[m];
  fft.forward();

  SpectralField out(f.grid);
  const double scale = 1.0 / static_cast<double>(n);
  for (int j = -N; j < N; ++j) out[j] = parity(j) * scale * buf[wrap(j, n)];
  return out;
}

std::vector<cplx> inverse_dft_complex(const SpectralField& F) {
  const int N = F.grid.modes();
  const std::size_t n = F.grid.size();
  FftBuffer fft(n);
  auto buf = fft.data();
  for (int j = -N; j < N; ++j) buf[wrap(j, n)] = parity(j) * F[j];
  fft.backward();
  return {buf.begin(), buf.end()};
}

PhysicalField inverse_dft(const SpectralField& F) {
  const auto z = inverse_dft_complex(F);
  std::vector<double> v(z.size());
  std::transform(z.begin(), z.end(), v.begin(), [](cplx c) { return c.real(); });
  return {F.grid, std::move(v)};
}

double eval_at(const PeriodicGrid& grid, std::span<const cplx> coeffs, double x) {
  const int N = grid.modes();
  const double theta = std::numbers::pi * x / grid.half_period();
  const cplx step = std::polar(1.0, theta);
  cplx phase = std::polar(1.0, -N * theta);
  double acc = 0.0;
  for (int j = -N; j < N; ++j) {
    const cplx c = coeffs[grid.slot(j)];
    acc += c.real() * phase.real() - c.imag() * phase.imag();
    phase *= step;
  }
  return acc;
}

double eval_at(const SpectralField& F, double x) { return eval_at(F.grid, F.coeffs, x); }

SpectralField spectral_derivative(const SpectralField& F, int order) {
  if (order < 0) throw DomainError("derivative order must be nonnegative");
  SpectralField out(F.grid);
  const int N = F.grid.modes();
  for (int j = -N; j < N; ++j) {
    const cplx ik{0.0, F.grid.wavenumber(j)};
    cplx factor{1.0, 0.0};
    for (int p = 0; p < order; ++p) factor *= ik;
    out[j] = factor * F[j];
  }
  return out;
}

void truncated_convolution(int N, std::span<const cplx> a, std::span<const cplx> b,
                           std::span<cplx> out) {
  auto at = [N](std::span<const cplx> s, int j) { return s[static_cast<std::size_t>(j + N)]; };
  for (int j = -N; j < 0; ++j) {
    cplx acc{};
    for (int l = -N; l <= N + j; ++l) acc += at(a, l) * at(b, j - l);
    out[static_cast<std::size_t>(j + N)] = acc;
  }
  for (int j = 0; j < N; ++j) {
    cplx acc{};
    for (int l = j + 1 - N; l <= N - 1; ++l) acc += at(a, j - l) * at(b, l);
    out[static_cast<std::size_t>(j + N)] = acc;
  }
}

SpectralField truncated_convolution(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid);
  SpectralField out(a.grid);
  truncated_convolution(a.grid.modes(), a.coeffs, b.coeffs, out.coeffs);
  return out;
}

struct DealiasedProduct::Impl {
  explicit Impl(int modes) : N(modes), M(padded(modes)), fa(M), fb(M) {}

  static std::size_t padded(int modes) {
    std::size_t m = 1;
    while (m < 4 * static_cast<std::size_t>(modes)) m <<= 1;
    return m;
  }

  int N;
  std::size_t M;
  FftBuffer fa;
  FftBuffer fb;
};

DealiasedProduct::DealiasedProduct(int modes) {
  if (modes < 1) throw ConfigError("mode cutoff N must be at least 1");
  impl_ = std::make_unique<Impl>(modes);
}

DealiasedProduct::~DealiasedProduct() = default;
DealiasedProduct::DealiasedProduct(DealiasedProduct&&) noexcept = default;
DealiasedProduct& DealiasedProduct::operator=(DealiasedProduct&&) noexcept = default;

std::size_t DealiasedProduct::padded_size() const noexcept { return impl_->M; }

void DealiasedProduct::operator()(std::span<const cplx> a, std::span<const cplx> b,
                                  std::span<cplx> out) {
  const int N = impl_->N;
  const std::size_t M = impl_->M;
  auto pa = impl_->fa.data();
  auto pb = impl_->fb.data();
  std::fill(pa.begin(), pa.end(), cplx{});
  std::fill(pb.begin(), pb.end(), cplx{});
  for (int j = -N; j < N; ++j) {
    pa[wrap(j, M)] = a[static_cast<std::size_t>(j + N)];
    pb[wrap(j, M)] = b[static_cast<std::size_t>(j + N)];
  }
  impl_->fa.backward();
  impl_->fb.backward();
  for (std::size_t m = 0; m < M; ++m) pa[m] *= pb[m];
  impl_->fa.forward();
  const double scale = 1.0 / static_cast<double>(M);
  for (int j = -N; j < N; ++j) out[static_cast<std::size_t>(j + N)] = scale * pa[wrap(j, M)];
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid);
  DealiasedProduct product(a.grid.modes());
  SpectralField out(a.grid);
  product(a.coeffs, b.coeffs, out.coeffs);
  return out;
}

PhysicalField cumulative_integral(const PhysicalField& f) {
  const double h = f.grid.spacing();
  std::vector<double> g(f.values.size(), 0.0);
  for (std::size_t m = 1; m < g.size(); ++m)
    g[m] = g[m - 1] + 0.5 * h * (f.values[m - 1] + f.values[m]);
  return {f.grid, std::move(g)};
}

void enforce_hermitian(std::span<cplx> c) {
  const int N = static_cast<int>(c.size() / 2);
  auto at = [&](int j) -> cplx& { return c[static_cast<std::size_t>(j + N)]; };
  at(-N) = 0.0;
  at(0) = at(0).real();
  for (int j = 1; j < N; ++j) {
    const cplx avg = 0.5 * (at(j) + std::conj(at(-j)));
    at(j) = avg;
    at(-j) = std::conj(avg);
  }
}

double hermitian_defect(std::span<const cplx> c) {
  const int N = static_cast<int>(c.size() / 2);
  auto at = [&](int j) { return c[static_cast<std::size_t>(j + N)]; };
  double d = std::max(std::abs(at(-N)), std::abs(at(0).imag()));
  for (int j = 1; j < N; ++j) d = std::max(d, std::abs(at(j) - std::conj(at(-j))));
  return d;
}

std::vector<double> sample_uniform(const PeriodicGrid& grid, std::span<const cplx> coeffs,
                                   double lo, double hi, std::size_t count) {
  std::vector<double> out(count, 0.0);
  if (count == 0) return out;
  const int N = grid.modes();
  const double L = grid.half_period();
  const double tol = 1e-12 * L;

  if (std::abs(lo + L) <= tol && std::abs(hi - L) <= tol) {
    // x_m = -L + 2Lm/M, so exp(i pi j x_m / L) = (-1)^j exp(2 pi i j m / M).
    FftBuffer fft(count);
    auto buf = fft.data();
    std::fill(buf.begin(), buf.end(), cplx{});
    for (int j = -N; j < N; ++j) buf[wrap(j, count)] += parity(j) * coeffs[grid.slot(j)];
    fft.backward();
    for (std::size_t m = 0; m < count; ++m) out[m] = buf[m].real();
    return out;
  }

  const double dx = (hi - lo) / static_cast<double>(count);
  constexpr std::size_t block = 256;
  std::vector<cplx> step(grid.size());
  for (int j = -N; j < N; ++j) step[grid.slot(j)] = std::polar(1.0, grid.wavenumber(j) * dx);

  for (std::size_t start = 0; start < count; start += block) {
    const std::size_t stop = std::min(count, start + block);
    const double x0 = lo + static_cast<double>(start) * dx;
    for (int j = -N; j < N; ++j) {
      const std::size_t s = grid.slot(j);
      cplx z = coeffs[s] * std::polar(1.0, grid.wavenumber(j) * x0);
      for (std::size_t m = start; m < stop; ++m) {
        out[m] += z.real();
        z *= step[s];
      }
    }
  }
  return out;
}

}  // namespace bouss
