#pragma once

#include <cstddef>
#include <memory>

#include "phoneval/beamform.hpp"
#include "phoneval/scene.hpp"
#include "phoneval/waveform.hpp"

namespace phoneval {

inline constexpr std::size_t kDefaultFilterLength = 512;
inline constexpr double kMetricCapDb = 100.0;

/// estimate = s_target + e_interf + e_artif, all on the estimate's timeline.
struct Decomposition {
  Waveform s_target;
  Waveform e_interf;
  Waveform e_artif;
  std::size_t filter_length = 0;

  [[nodiscard]] std::size_t length() const noexcept { return s_target.size(); }
};

/// Ratios in dB, each clamped to [-100, +100].
struct MetricTriple {
  double sdr_db = 0.0;
  double sir_db = 0.0;
  double sar_db = 0.0;
};

/// Projection machinery for one (target, interferer) reference pair. The Gram matrices of
/// the shifted references are factored once, so many estimates can be decomposed cheaply.
///
/// Column k of the target basis is speech_ref delayed by k samples and truncated to the
/// signal length (k = 0 .. filter_length - 1); likewise for the interferer.
class BssProjector {
 public:
  BssProjector(const Waveform& speech_ref, const Waveform& noise_ref,
               std::size_t filter_length = kDefaultFilterLength);
  ~BssProjector();
  BssProjector(BssProjector&&) noexcept;
  BssProjector& operator=(BssProjector&&) noexcept;

  [[nodiscard]] Decomposition decompose(const Waveform& estimate) const;
  [[nodiscard]] std::size_t length() const noexcept;
  [[nodiscard]] std::size_t filter_length() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Decomposition decompose(const Waveform& estimate, const Waveform& speech_ref,
                        const Waveform& noise_ref,
                        std::size_t filter_length = kDefaultFilterLength);

/// 10 log10(num / den) with the +-100 dB caps: num == 0 gives -100, den == 0 gives +100.
double capped_ratio_db(double numerator, double denominator);

MetricTriple metrics_from_decomposition(const Decomposition& d);

/// Metrics from the decomposition's energies restricted to samples [start, end).
MetricTriple segment_metrics(const Decomposition& d, std::size_t start, std::size_t end);

/// Input protocol: the unprocessed reference-channel mixture scored against the
/// reference-channel speech and noise images of `ear`.
MetricTriple input_metrics(const Scene& scene, Ear ear,
                           std::size_t filter_length = kDefaultFilterLength);

}  // namespace phoneval
