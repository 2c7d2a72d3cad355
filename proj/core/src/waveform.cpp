#include "phoneval/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phoneval/error.hpp"

namespace phoneval {

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw InvalidArgument("waveform sample rate must be positive, got " +
                          std::to_string(sample_rate_));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw NumericalError("waveform sample " + std::to_string(i) + " is not finite");
    }
  }
}

Waveform Waveform::zeros(std::size_t length, int sample_rate) {
  return Waveform(std::vector<double>(length, 0.0), sample_rate);
}

double Waveform::energy() const noexcept { return energy(0, samples_.size()); }

double Waveform::energy(std::size_t begin, std::size_t end) const {
  if (begin > end || end > samples_.size()) {
    throw InvalidArgument("energy range [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside signal of length " + std::to_string(samples_.size()));
  }
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += samples_[i] * samples_[i];
  return acc;
}

Waveform Waveform::scaled(double gain) const {
  std::vector<double> out(samples_);
  for (double& v : out) v *= gain;
  return Waveform(std::move(out), sample_rate_);
}

Waveform Waveform::resized(std::size_t length) const {
  std::vector<double> out(samples_);
  out.resize(length, 0.0);
  return Waveform(std::move(out), sample_rate_);
}

Waveform Waveform::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > samples_.size()) {
    throw InvalidArgument("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside signal of length " + std::to_string(samples_.size()));
  }
  return Waveform(std::vector<double>(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                      samples_.begin() + static_cast<std::ptrdiff_t>(end)),
                  sample_rate_);
}

namespace {

template <typename Op>
Waveform combine(const Waveform& a, const Waveform& b, Op op) {
  if (a.size() != b.size() || a.sample_rate() != b.sample_rate()) {
    throw DimensionError("waveform operands differ in length or sample rate");
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return Waveform(std::move(out), a.sample_rate());
}

}  // namespace

Waveform operator+(const Waveform& a, const Waveform& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}

Waveform operator-(const Waveform& a, const Waveform& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}

MultichannelWaveform::MultichannelWaveform(std::vector<Waveform> channels,
                                           std::vector<std::string> layout)
    : channels_(std::move(channels)), layout_(std::move(layout)) {
  if (layout_.size() != channels_.size()) {
    throw DimensionError("layout has " + std::to_string(layout_.size()) + " labels for " +
                         std::to_string(channels_.size()) + " channels");
  }
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size() ||
        ch.sample_rate() != channels_.front().sample_rate()) {
      throw DimensionError("channels must share length and sample rate");
    }
  }
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    for (std::size_t j = i + 1; j < layout_.size(); ++j) {
      if (layout_[i] == layout_[j]) throw InvalidArgument("duplicate channel label " + layout_[i]);
    }
  }
}

namespace {

std::vector<std::string> numbered_layout(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace

MultichannelWaveform::MultichannelWaveform(std::vector<Waveform> channels)
    : MultichannelWaveform(channels, numbered_layout(channels.size())) {}

std::size_t MultichannelWaveform::index_of(std::string_view label) const {
  auto it = std::find(layout_.begin(), layout_.end(), label);
  if (it == layout_.end()) throw InvalidArgument("no channel labelled " + std::string(label));
  return static_cast<std::size_t>(it - layout_.begin());
}

bool MultichannelWaveform::has_channel(std::string_view label) const noexcept {
  return std::find(layout_.begin(), layout_.end(), label) != layout_.end();
}

const Waveform& MultichannelWaveform::channel(std::string_view label) const {
  return channels_[index_of(label)];
}

MultichannelWaveform MultichannelWaveform::select(std::span<const std::string> labels) const {
  std::vector<Waveform> picked;
  picked.reserve(labels.size());
  for (const auto& label : labels) picked.push_back(channel(label));
  return MultichannelWaveform(std::move(picked),
                              std::vector<std::string>(labels.begin(), labels.end()));
}

MultichannelWaveform MultichannelWaveform::resized(std::size_t length) const {
  std::vector<Waveform> out;
  out.reserve(channels_.size());
  for (const auto& ch : channels_) out.push_back(ch.resized(length));
  return MultichannelWaveform(std::move(out), layout_);
}

MultichannelWaveform operator+(const MultichannelWaveform& a, const MultichannelWaveform& b) {
  if (a.layout() != b.layout()) throw DimensionError("multichannel operands differ in layout");
  std::vector<Waveform> out;
  out.reserve(a.num_channels());
  for (std::size_t m = 0; m < a.num_channels(); ++m) out.push_back(a.channel(m) + b.channel(m));
  return MultichannelWaveform(std::move(out), a.layout());
}

}  // namespace phoneval
