#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phoneval {

inline constexpr int kDefaultSampleRate = 16000;

/// Single-channel real signal. Samples are finite; the sample rate is positive.
class Waveform {
 public:
  Waveform() = default;
  Waveform(std::vector<double> samples, int sample_rate);

  static Waveform zeros(std::size_t length, int sample_rate);

  [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
  [[nodiscard]] int sample_rate() const noexcept { return sample_rate_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return samples_[i]; }
  [[nodiscard]] double duration_seconds() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  /// Sum of squared samples.
  [[nodiscard]] double energy() const noexcept;
  /// Sum of squared samples over [begin, end).
  [[nodiscard]] double energy(std::size_t begin, std::size_t end) const;

  [[nodiscard]] Waveform scaled(double gain) const;
  /// Zero-padded (or truncated) copy with exactly `length` samples.
  [[nodiscard]] Waveform resized(std::size_t length) const;
  [[nodiscard]] Waveform slice(std::size_t begin, std::size_t end) const;

  /// Moves the sample buffer out, leaving an empty waveform behind.
  [[nodiscard]] std::vector<double> release() && noexcept { return std::move(samples_); }

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_ = kDefaultSampleRate;
};

Waveform operator+(const Waveform& a, const Waveform& b);
Waveform operator-(const Waveform& a, const Waveform& b);

/// Ordered set of equal-length channels sharing one sample rate, each with a label.
class MultichannelWaveform {
 public:
  MultichannelWaveform() = default;
  MultichannelWaveform(std::vector<Waveform> channels, std::vector<std::string> layout);
  /// Generic labels "0", "1", ...
  explicit MultichannelWaveform(std::vector<Waveform> channels);

  [[nodiscard]] std::size_t num_channels() const noexcept { return channels_.size(); }
  [[nodiscard]] std::size_t length() const noexcept {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  [[nodiscard]] int sample_rate() const noexcept {
    return channels_.empty() ? kDefaultSampleRate : channels_.front().sample_rate();
  }
  [[nodiscard]] const Waveform& channel(std::size_t index) const { return channels_.at(index); }
  [[nodiscard]] const Waveform& channel(std::string_view label) const;
  [[nodiscard]] std::size_t index_of(std::string_view label) const;
  [[nodiscard]] bool has_channel(std::string_view label) const noexcept;
  [[nodiscard]] const std::vector<Waveform>& channels() const noexcept { return channels_; }
  [[nodiscard]] const std::vector<std::string>& layout() const noexcept { return layout_; }

  /// Channels picked (and reordered) by label.
  [[nodiscard]] MultichannelWaveform select(std::span<const std::string> labels) const;
  /// Every channel zero-padded or truncated to `length`.
  [[nodiscard]] MultichannelWaveform resized(std::size_t length) const;

  friend bool operator==(const MultichannelWaveform&, const MultichannelWaveform&) = default;

 private:
  std::vector<Waveform> channels_;
  std::vector<std::string> layout_;
};

MultichannelWaveform operator+(const MultichannelWaveform& a, const MultichannelWaveform& b);

}  // namespace phoneval
