#include "phoneval/stft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "phoneval/error.hpp"

namespace phoneval {

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::SqrtHann: return "sqrt_hann";
    case WindowKind::Hann: return "hann";
    case WindowKind::Rectangular: return "rectangular";
  }
  return "unknown";
}

WindowKind parse_window_kind(std::string_view name) {
  if (name == "sqrt_hann") return WindowKind::SqrtHann;
  if (name == "hann") return WindowKind::Hann;
  if (name == "rectangular" || name == "rect") return WindowKind::Rectangular;
  throw ConfigError("unknown window '" + std::string(name) +
                    "' (expected sqrt_hann, hann or rectangular)");
}

std::vector<double> StftConfig::taper() const {
  std::vector<double> w(window_length, 1.0);
  const double n = static_cast<double>(window_length);
  for (std::size_t i = 0; i < window_length; ++i) {
    // Periodic tapers: exact overlap-add at hop = window/2.
    const double s = std::sin(std::numbers::pi * static_cast<double>(i) / n);
    switch (window) {
      case WindowKind::SqrtHann: w[i] = s; break;
      case WindowKind::Hann: w[i] = s * s; break;
      case WindowKind::Rectangular: break;
    }
  }
  return w;
}

void StftConfig::validate() const {
  if (window_length == 0) throw ConfigError("stft window_length must be positive");
  if (hop_length == 0 || hop_length > window_length) {
    throw ConfigError("stft hop_length must satisfy 0 < hop <= window (hop " +
                      std::to_string(hop_length) + ", window " + std::to_string(window_length) +
                      ")");
  }
  // Steady-state overlap-add of analysis x synthesis taper, one hop period.
  const auto w = taper();
  double peak = 0.0;
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < hop_length; ++n) {
    double acc = 0.0;
    for (std::size_t k = n; k < window_length; k += hop_length) acc += w[k] * w[k];
    peak = std::max(peak, acc);
    floor = std::min(floor, acc);
  }
  if (!(floor > 1e-8 * peak)) {
    throw ConfigError("stft taper " + std::string(to_string(window)) + " with window " +
                      std::to_string(window_length) + " and hop " + std::to_string(hop_length) +
                      " does not satisfy the overlap-add reconstruction condition");
  }
}

std::size_t StftConfig::num_frames(std::size_t length) const noexcept {
  // front padding + signal + enough tail for the last sample to be fully overlapped
  const std::size_t front = front_padding();
  std::size_t padded = front + length + front;
  padded = std::max(padded, window_length);
  const std::size_t rem = (padded - window_length) % hop_length;
  if (rem != 0) padded += hop_length - rem;
  return (padded - window_length) / hop_length + 1;
}

Spectrogram::Spectrogram(std::size_t frames, std::size_t bins)
    : frames_(frames), bins_(bins), data_(frames * bins) {}

MultichannelSpectrogram::MultichannelSpectrogram(std::vector<Spectrogram> channels,
                                                 int sample_rate, StftConfig config)
    : channels_(std::move(channels)), sample_rate_(sample_rate), config_(config) {
  for (const auto& ch : channels_) {
    if (ch.frames() != channels_.front().frames() || ch.bins() != channels_.front().bins()) {
      throw DimensionError("spectrogram channels differ in shape");
    }
  }
}

namespace {

void analyze(const Waveform& signal, const StftConfig& config, const RealFft& fft,
             const std::vector<double>& w, Spectrogram& out) {
  const std::size_t win = config.window_length;
  const long front = static_cast<long>(config.front_padding());
  const long n = static_cast<long>(signal.size());
  std::vector<double> frame(win);
  for (std::size_t t = 0; t < out.frames(); ++t) {
    const long start = static_cast<long>(t * config.hop_length) - front;
    for (std::size_t i = 0; i < win; ++i) {
      const long idx = start + static_cast<long>(i);
      frame[i] = (idx >= 0 && idx < n) ? signal[static_cast<std::size_t>(idx)] * w[i] : 0.0;
    }
    fft.forward(frame, out.frame(t));
  }
}

std::vector<double> synthesize(const Spectrogram& spec, const StftConfig& config,
                               const RealFft& fft, const std::vector<double>& w,
                               std::size_t length) {
  const std::size_t win = config.window_length;
  const long front = static_cast<long>(config.front_padding());
  std::vector<double> num(length, 0.0), den(length, 0.0);
  std::vector<double> frame(win);
  const double scale = 1.0 / static_cast<double>(win);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    fft.inverse(spec.frame(t), frame);
    const long start = static_cast<long>(t * config.hop_length) - front;
    for (std::size_t i = 0; i < win; ++i) {
      const long idx = start + static_cast<long>(i);
      if (idx < 0 || idx >= static_cast<long>(length)) continue;
      num[static_cast<std::size_t>(idx)] += frame[i] * scale * w[i];
      den[static_cast<std::size_t>(idx)] += w[i] * w[i];
    }
  }
  for (std::size_t i = 0; i < length; ++i) num[i] = den[i] > 0.0 ? num[i] / den[i] : 0.0;
  return num;
}

}  // namespace

Spectrogram stft(const Waveform& signal, const StftConfig& config) {
  config.validate();
  const RealFft fft(config.window_length);
  const auto w = config.taper();
  Spectrogram out(config.num_frames(signal.size()), config.num_bins());
  analyze(signal, config, fft, w, out);
  return out;
}

MultichannelSpectrogram stft(const MultichannelWaveform& signal, const StftConfig& config) {
  config.validate();
  const RealFft fft(config.window_length);
  const auto w = config.taper();
  std::vector<Spectrogram> channels;
  channels.reserve(signal.num_channels());
  for (const auto& ch : signal.channels()) {
    Spectrogram s(config.num_frames(ch.size()), config.num_bins());
    analyze(ch, config, fft, w, s);
    channels.push_back(std::move(s));
  }
  return MultichannelSpectrogram(std::move(channels), signal.sample_rate(), config);
}

Waveform istft(const Spectrogram& spec, const StftConfig& config, std::size_t length,
               int sample_rate) {
  config.validate();
  if (spec.bins() != config.num_bins()) {
    throw DimensionError("istft: spectrogram has " + std::to_string(spec.bins()) +
                         " bins, config implies " + std::to_string(config.num_bins()));
  }
  if (spec.frames() < config.num_frames(length)) {
    throw DimensionError("istft: " + std::to_string(spec.frames()) +
                         " frames cannot cover " + std::to_string(length) + " samples");
  }
  const RealFft fft(config.window_length);
  return Waveform(synthesize(spec, config, fft, config.taper(), length), sample_rate);
}

MultichannelWaveform istft(const MultichannelSpectrogram& spec, const StftConfig& config,
                           std::size_t length) {
  std::vector<Waveform> channels;
  channels.reserve(spec.num_channels());
  for (std::size_t m = 0; m < spec.num_channels(); ++m) {
    channels.push_back(istft(spec.channel(m), config, length, spec.sample_rate()));
  }
  return MultichannelWaveform(std::move(channels));
}

}  // namespace phoneval
