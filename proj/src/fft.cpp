#include "fft.hpp"

#include <mutex>
#include <new>

namespace bouss::detail {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftBuffer::FftBuffer(std::size_t n) : n_(n) {
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
  if (buf_ == nullptr) throw std::bad_alloc();
  auto* raw = reinterpret_cast<fftw_complex*>(buf_);
  std::lock_guard lock(planner_mutex());
  fwd_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(static_cast<int>(n), raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftBuffer::~FftBuffer() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(buf_);
}

void FftBuffer::forward() noexcept { fftw_execute(fwd_); }
void FftBuffer::backward() noexcept { fftw_execute(bwd_); }

}  // namespace bouss::detail

namespace bouss {

const char* fft_backend_version() noexcept { return fftw_version; }

}  // namespace bouss
