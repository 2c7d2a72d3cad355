#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace phoneval {

using Complex = std::complex<double>;

/// Real-to-complex DFT of fixed length backed by FFTW. Transforms are unnormalized:
/// inverse(forward(x)) == n * x. Construction and destruction serialize on the FFTW
/// planner lock; execution is safe to share between threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t bins() const noexcept { return n_ / 2 + 1; }

  /// `in` has size() samples, `out` has bins() entries.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// `in` has bins() entries (imaginary parts of DC/Nyquist ignored), `out` has size() samples.
  void inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  std::size_t n_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Complex DFT of fixed length; unnormalized like RealFft.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  std::size_t n_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

}  // namespace phoneval
