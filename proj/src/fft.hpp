#pragma once
// Internal RAII wrapper over an in-place FFTW complex transform.

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace bouss::detail {

class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n);
  ~FftBuffer();
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::span<std::complex<double>> data() noexcept { return {buf_, n_}; }

  /// out[k] = sum_m in[m] exp(-2 pi i k m / n), unnormalized.
  void forward() noexcept;
  /// out[k] = sum_m in[m] exp(+2 pi i k m / n), unnormalized.
  void backward() noexcept;

 private:
  std::size_t n_;
  std::complex<double>* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace bouss::detail
