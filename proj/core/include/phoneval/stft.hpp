#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "phoneval/fft.hpp"
#include "phoneval/waveform.hpp"

namespace phoneval {

enum class WindowKind { SqrtHann, Hann, Rectangular };

std::string_view to_string(WindowKind kind);
WindowKind parse_window_kind(std::string_view name);

/// Framing parameters. The same taper is used for analysis and synthesis.
struct StftConfig {
  std::size_t window_length = 512;
  std::size_t hop_length = 256;
  WindowKind window = WindowKind::SqrtHann;

  /// Throws ConfigError unless 0 < hop <= window and the weighted overlap-add of the
  /// squared taper never vanishes (so every sample can be reconstructed).
  void validate() const;
  [[nodiscard]] std::vector<double> taper() const;
  [[nodiscard]] std::size_t num_bins() const noexcept { return window_length / 2 + 1; }
  /// Zeros prepended before framing; the first original sample sits at this offset.
  [[nodiscard]] std::size_t front_padding() const noexcept { return window_length - hop_length; }
  /// Number of frames produced for a signal of `length` samples.
  [[nodiscard]] std::size_t num_frames(std::size_t length) const noexcept;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

/// Single-channel one-sided spectrogram, indexed (frame t, bin f).
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t frames, std::size_t bins);

  [[nodiscard]] std::size_t frames() const noexcept { return frames_; }
  [[nodiscard]] std::size_t bins() const noexcept { return bins_; }
  [[nodiscard]] Complex& operator()(std::size_t t, std::size_t f) noexcept {
    return data_[t * bins_ + f];
  }
  [[nodiscard]] const Complex& operator()(std::size_t t, std::size_t f) const noexcept {
    return data_[t * bins_ + f];
  }
  [[nodiscard]] std::span<Complex> frame(std::size_t t) noexcept {
    return {data_.data() + t * bins_, bins_};
  }
  [[nodiscard]] std::span<const Complex> frame(std::size_t t) const noexcept {
    return {data_.data() + t * bins_, bins_};
  }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<Complex> data_;
};

/// Stack of equally shaped spectrograms, one per channel (m, t, f).
class MultichannelSpectrogram {
 public:
  MultichannelSpectrogram() = default;
  MultichannelSpectrogram(std::vector<Spectrogram> channels, int sample_rate, StftConfig config);

  [[nodiscard]] std::size_t num_channels() const noexcept { return channels_.size(); }
  [[nodiscard]] std::size_t frames() const noexcept {
    return channels_.empty() ? 0 : channels_.front().frames();
  }
  [[nodiscard]] std::size_t bins() const noexcept {
    return channels_.empty() ? 0 : channels_.front().bins();
  }
  [[nodiscard]] const Spectrogram& channel(std::size_t m) const { return channels_.at(m); }
  [[nodiscard]] const Complex& operator()(std::size_t m, std::size_t t, std::size_t f) const {
    return channels_[m](t, f);
  }
  [[nodiscard]] int sample_rate() const noexcept { return sample_rate_; }
  [[nodiscard]] const StftConfig& config() const noexcept { return config_; }

 private:
  std::vector<Spectrogram> channels_;
  int sample_rate_ = kDefaultSampleRate;
  StftConfig config_;
};

Spectrogram stft(const Waveform& signal, const StftConfig& config);
MultichannelSpectrogram stft(const MultichannelWaveform& signal, const StftConfig& config);

/// Weighted overlap-add inverse, cropped to `length` samples of the original timeline.
Waveform istft(const Spectrogram& spec, const StftConfig& config, std::size_t length,
               int sample_rate);
MultichannelWaveform istft(const MultichannelSpectrogram& spec, const StftConfig& config,
                           std::size_t length);

}  // namespace phoneval
