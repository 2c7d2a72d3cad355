#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phoneval {

/// Full linear convolution, length a.size() + b.size() - 1 (empty if either input is empty).
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

/// Cross-correlation c(d) = sum_t a[t] * b[t - d] for d in [min_lag, max_lag],
/// indexed from min_lag. Terms outside either signal are zero.
std::vector<double> correlate(std::span<const double> a, std::span<const double> b, long min_lag,
                              long max_lag);

/// Causal FIR filtering truncated to the input length: y[t] = sum_k h[k] x[t - k].
std::vector<double> fir_filter(std::span<const double> h, std::span<const double> x);

}  // namespace phoneval
