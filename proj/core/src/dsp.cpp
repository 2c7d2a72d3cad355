#include "phoneval/dsp.hpp"

#include <algorithm>

#include "phoneval/error.hpp"
#include "phoneval/fft.hpp"

namespace phoneval {
namespace {

// Below this many multiply-adds the direct loop beats three FFTs.
constexpr std::size_t kDirectWorkLimit = 1U << 16;

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b,
                                 std::size_t out_len) {
  const std::size_t n = next_pow2(a.size() + b.size() - 1);
  RealFft fft(n);
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  std::vector<Complex> fa(fft.bins()), fb(fft.bins());
  fft.forward(pa, fa);
  fft.forward(pb, fb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  fft.inverse(fa, pa);
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = pa[i] * scale;
  return out;
}

}  // namespace

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (a.size() * b.size() <= kDirectWorkLimit) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }
  return fft_convolve(a, b, out_len);
}

std::vector<double> correlate(std::span<const double> a, std::span<const double> b, long min_lag,
                              long max_lag) {
  if (max_lag < min_lag) throw InvalidArgument("correlate: max_lag < min_lag");
  const std::size_t count = static_cast<std::size_t>(max_lag - min_lag + 1);
  std::vector<double> out(count, 0.0);
  if (a.empty() || b.empty()) return out;

  const long na = static_cast<long>(a.size());
  const long nb = static_cast<long>(b.size());
  if (a.size() * count <= kDirectWorkLimit) {
    for (long d = min_lag; d <= max_lag; ++d) {
      double acc = 0.0;
      const long t0 = std::max(0L, d);
      const long t1 = std::min(na, nb + d);
      for (long t = t0; t < t1; ++t) acc += a[t] * b[t - d];
      out[static_cast<std::size_t>(d - min_lag)] = acc;
    }
    return out;
  }
  // c(d) = sum_t a[t] b[t-d] = (a * reversed(b))[d + nb - 1]
  std::vector<double> rb(b.rbegin(), b.rend());
  const auto full = fft_convolve(a, rb, a.size() + b.size() - 1);
  for (long d = min_lag; d <= max_lag; ++d) {
    const long idx = d + nb - 1;
    if (idx >= 0 && idx < static_cast<long>(full.size())) {
      out[static_cast<std::size_t>(d - min_lag)] = full[static_cast<std::size_t>(idx)];
    }
  }
  return out;
}

std::vector<double> fir_filter(std::span<const double> h, std::span<const double> x) {
  if (x.empty()) return {};
  if (h.empty()) return std::vector<double>(x.size(), 0.0);
  auto full = convolve(h, x);
  full.resize(x.size());
  return full;
}

}  // namespace phoneval
