#include "phoneval/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <string>
#include <vector>

#include "phoneval/error.hpp"

namespace phoneval {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(want) +
                         " entries, got " + std::to_string(got));
  }
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("FFT length must be positive");
  std::vector<double> real(n);
  std::vector<Complex> spec(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, real.data(), as_fftw(spec.data()), kPlanFlags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, as_fftw(spec.data()), real.data(), kPlanFlags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw NumericalError("FFTW failed to plan a real transform of length " + std::to_string(n));
  }
}

RealFft::~RealFft() {
  if (forward_plan_ == nullptr && inverse_plan_ == nullptr) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

RealFft::RealFft(RealFft&& other) noexcept
    : n_(other.n_), forward_plan_(other.forward_plan_), inverse_plan_(other.inverse_plan_) {
  other.forward_plan_ = nullptr;
  other.inverse_plan_ = nullptr;
}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    std::swap(n_, other.n_);
    std::swap(forward_plan_, other.forward_plan_);
    std::swap(inverse_plan_, other.inverse_plan_);
  }
  return *this;
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  check_size(in.size(), n_, "RealFft::forward input");
  check_size(out.size(), bins(), "RealFft::forward output");
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       as_fftw(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
  check_size(in.size(), bins(), "RealFft::inverse input");
  check_size(out.size(), n_, "RealFft::inverse output");
  // c2r overwrites its input.
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(scratch.data()),
                       out.data());
}

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("FFT length must be positive");
  std::vector<Complex> a(n), b(n);
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  forward_plan_ =
      fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, kPlanFlags);
  inverse_plan_ =
      fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, kPlanFlags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw NumericalError("FFTW failed to plan a complex transform of length " + std::to_string(n));
  }
}

ComplexFft::~ComplexFft() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void ComplexFft::forward(std::span<const Complex> in, std::span<Complex> out) const {
  check_size(in.size(), n_, "ComplexFft::forward input");
  check_size(out.size(), n_, "ComplexFft::forward output");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in.data()), as_fftw(out.data()));
}

void ComplexFft::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  check_size(in.size(), n_, "ComplexFft::inverse input");
  check_size(out.size(), n_, "ComplexFft::inverse output");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), as_fftw(out.data()));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1U;
  return p;
}

}  // namespace phoneval
