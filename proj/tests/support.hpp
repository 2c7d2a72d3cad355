#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phoneval/waveform.hpp"

namespace phoneval::testing {

inline std::vector<double> gaussian_vector(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline Waveform gaussian_waveform(std::size_t n, std::uint64_t seed, double sigma = 1.0,
                                  int sr = kDefaultSampleRate) {
  return Waveform(gaussian_vector(n, seed, sigma), sr);
}

// O(n^2) DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N).
inline std::vector<std::complex<double>> direct_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> direct_convolution(const std::vector<double>& a,
                                              const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

inline double relative_l2(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// Random Hermitian PSD matrix A Aᴴ / cols with A complex Gaussian.
inline Eigen::MatrixXcd random_psd(Eigen::Index m, std::uint64_t seed, Eigen::Index cols = -1) {
  if (cols < 0) cols = 2 * m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXcd a(m, cols);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = {dist(rng), dist(rng)};
  }
  Eigen::MatrixXcd r = a * a.adjoint() / static_cast<double>(cols);
  return 0.5 * (r + r.adjoint());
}

inline Eigen::VectorXcd random_complex_vector(Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::VectorXcd v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = {dist(rng), dist(rng)};
  return v;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("phoneval_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace phoneval::testing
