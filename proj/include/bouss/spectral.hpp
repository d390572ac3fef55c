#pragma once
//==============================================================================
// Periodic grid, the discrete Fourier pair on [-L, L), spectral derivatives
// and the windowed convolution of coefficient sequences.
//
// Coefficients are indexed j = -N..N-1 and stored in a flat array at slot
// j + N. The window is kept asymmetric: there is no +N mode.
//==============================================================================

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace bouss {

using cplx = std::complex<double>;

class PeriodicGrid {
 public:
  /// Half-period L > 0 and mode cutoff N >= 1. Throws ConfigError otherwise.
  PeriodicGrid(double half_period, int modes);

  double half_period() const noexcept { return L_; }
  int modes() const noexcept { return N_; }
  std::size_t size() const noexcept { return 2 * static_cast<std::size_t>(N_); }
  double spacing() const noexcept { return L_ / N_; }

  double point(int j) const noexcept { return j * L_ / N_; }
  std::vector<double> points() const;
  /// pi*j/L, the wavenumber carried by mode j.
  double wavenumber(int j) const noexcept;

  std::size_t slot(int j) const noexcept { return static_cast<std::size_t>(j + N_); }
  int index(std::size_t slot) const noexcept { return static_cast<int>(slot) - N_; }

  bool operator==(const PeriodicGrid&) const = default;

 private:
  double L_;
  int N_;
};

/// Samples f(x_j), j = -N..N-1, stored at slot j + N.
struct PhysicalField {
  PhysicalField(PeriodicGrid g, std::vector<double> v);
  static PhysicalField sample(const PeriodicGrid& g, const std::function<double(double)>& f);

  PeriodicGrid grid;
  std::vector<double> values;
};

/// Fourier coefficients f^(j), j = -N..N-1.
struct SpectralField {
  explicit SpectralField(PeriodicGrid g);
  SpectralField(PeriodicGrid g, std::vector<cplx> c);

  cplx& operator[](int j) { return coeffs[grid.slot(j)]; }
  const cplx& operator[](int j) const { return coeffs[grid.slot(j)]; }

  PeriodicGrid grid;
  std::vector<cplx> coeffs;
};

/// f^(j) = (1/2N) sum_l f(x_l) exp(-i pi j x_l / L).
SpectralField forward_dft(const PhysicalField& f);
/// Real part of sum_j F(j) exp(i pi j x_l / L) at the grid points.
PhysicalField inverse_dft(const SpectralField& F);
/// Full complex inverse, used where the imaginary part matters.
std::vector<cplx> inverse_dft_complex(const SpectralField& F);

/// Trigonometric interpolant Re sum_j F(j) exp(i pi j x / L).
double eval_at(const SpectralField& F, double x);
double eval_at(const PeriodicGrid& grid, std::span<const cplx> coeffs, double x);

/// Multiplies mode j by (i pi j / L)^order.
SpectralField spectral_derivative(const SpectralField& F, int order);

/// Direct O(N^2) windowed convolution: both factor indices and the output
/// index lie in [-N, N-1].
SpectralField truncated_convolution(const SpectralField& a, const SpectralField& b);
void truncated_convolution(int modes, std::span<const cplx> a, std::span<const cplx> b,
                           std::span<cplx> out);

/// Zero-padded FFT evaluation of the same windowed convolution. Owns its
/// FFTW plans and scratch buffers, so one instance must not be shared
/// between threads.
class DealiasedProduct {
 public:
  explicit DealiasedProduct(int modes);
  ~DealiasedProduct();
  DealiasedProduct(const DealiasedProduct&) = delete;
  DealiasedProduct& operator=(const DealiasedProduct&) = delete;
  DealiasedProduct(DealiasedProduct&&) noexcept;
  DealiasedProduct& operator=(DealiasedProduct&&) noexcept;

  std::size_t padded_size() const noexcept;
  void operator()(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);

/// g(x_j) = int_{-L}^{x_j} f by the cumulative trapezoid rule; g(x_{-N}) = 0.
PhysicalField cumulative_integral(const PhysicalField& f);

/// Zeroes slot -N, makes mode 0 real and averages each (j, -j) pair into
/// conjugate-symmetric form.
void enforce_hermitian(std::span<cplx> coeffs);
/// max_j |c(j) - conj(c(-j))| over 1 <= j <= N-1, together with |Im c(0)| and |c(-N)|.
double hermitian_defect(std::span<const cplx> coeffs);

/// U at `count` equally spaced points lo + m*(hi-lo)/count, m = 0..count-1.
/// Uses one FFT when [lo, hi) is the full period, otherwise blockwise
/// exponential recurrences.
std::vector<double> sample_uniform(const PeriodicGrid& grid, std::span<const cplx> coeffs,
                                   double lo, double hi, std::size_t count);

/// Version string of the FFT library in use.
const char* fft_backend_version() noexcept;

}  // namespace bouss
