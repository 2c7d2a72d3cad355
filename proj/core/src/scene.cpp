#include "phoneval/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phoneval/dsp.hpp"
#include "phoneval/error.hpp"
#include "phoneval/random.hpp"
#include "phoneval/wav.hpp"

namespace phoneval {

void RirSet::add(int angle_deg, const std::string& channel, Waveform response) {
  if (std::find(layout_.begin(), layout_.end(), channel) == layout_.end()) {
    throw InvalidArgument("channel " + channel + " is not part of the RIR layout");
  }
  if (response.empty()) throw InvalidArgument("empty impulse response for " + channel);
  if (sample_rate_ && *sample_rate_ != response.sample_rate()) {
    throw FormatError("impulse response for angle " + std::to_string(angle_deg) + "/" + channel +
                      " has sample rate " + std::to_string(response.sample_rate()) +
                      ", set uses " + std::to_string(*sample_rate_));
  }
  sample_rate_ = response.sample_rate();
  entries_.insert_or_assign({angle_deg, channel}, std::move(response));
}

const Waveform& RirSet::at(int angle_deg, const std::string& channel) const {
  auto it = entries_.find({angle_deg, channel});
  if (it == entries_.end()) {
    throw InvalidArgument("no impulse response for angle " + std::to_string(angle_deg) +
                          " channel " + channel);
  }
  return it->second;
}

bool RirSet::has_angle(int angle_deg) const noexcept {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first.first == angle_deg; });
}

bool RirSet::complete(int angle_deg) const noexcept {
  return std::all_of(layout_.begin(), layout_.end(), [&](const std::string& ch) {
    return entries_.count({angle_deg, ch}) != 0;
  });
}

std::vector<int> RirSet::angles() const {
  std::vector<int> out;
  for (const auto& e : entries_) {
    if (out.empty() || out.back() != e.first.first) out.push_back(e.first.first);
  }
  return out;
}

RirSet RirSet::load(const std::filesystem::path& root, std::span<const int> angles,
                    std::vector<std::string> layout) {
  RirSet set(std::move(layout));
  for (int angle : angles) {
    const auto dir = root / std::to_string(angle);
    if (!std::filesystem::is_directory(dir)) {
      throw ConfigError("RIR root " + root.string() + " has no directory for angle " +
                        std::to_string(angle));
    }
    for (const auto& ch : set.layout()) {
      const auto file = dir / (ch + ".wav");
      if (!std::filesystem::exists(file)) {
        throw ConfigError("missing impulse response " + file.string());
      }
      set.add(angle, ch, read_wav_mono(file));
    }
  }
  return set;
}

void RirSet::save(const std::filesystem::path& root) const {
  for (const auto& [key, response] : entries_) {
    const auto dir = root / std::to_string(key.first);
    std::filesystem::create_directories(dir);
    write_wav(response, dir / (key.second + ".wav"), WavEncoding::Float32);
  }
}

RirSet synth_test_rirs(std::span<const RirTap> taps, const std::optional<DecayTail>& tail,
                       int sample_rate, std::vector<std::string> layout) {
  RirSet set(std::move(layout));
  for (const auto& tap : taps) {
    if (tap.delay < 0) {
      throw InvalidArgument("negative RIR delay for channel " + tap.channel);
    }
    const auto delay = static_cast<std::size_t>(tap.delay);
    std::size_t tail_len = 0;
    if (tail) {
      if (!(tail->time_constant_s > 0.0) || tail->length_s < 0.0) {
        throw InvalidArgument("decay tail needs a positive time constant and length");
      }
      tail_len = static_cast<std::size_t>(std::lround(tail->length_s * sample_rate));
    }
    std::vector<double> h(delay + 1 + tail_len, 0.0);
    h[delay] = tap.gain;
    if (tail_len > 0) {
      Rng rng(derive_seed(tail->seed, std::to_string(tap.angle_deg) + "/" + tap.channel));
      const double rate = 1.0 / (tail->time_constant_s * sample_rate);
      for (std::size_t k = 1; k <= tail_len; ++k) {
        h[delay + k] = tap.gain * tail->relative_gain * std::exp(-static_cast<double>(k) * rate) *
                       rng.sign();
      }
    }
    set.add(tap.angle_deg, tap.channel, Waveform(std::move(h), sample_rate));
  }
  return set;
}

MultichannelWaveform convolve_rir(const Waveform& source, const RirSet& rirs, int angle_deg) {
  if (!rirs.complete(angle_deg)) {
    throw InvalidArgument("RIR set has no complete response set for angle " +
                          std::to_string(angle_deg));
  }
  if (rirs.sample_rate() && *rirs.sample_rate() != source.sample_rate()) {
    throw FormatError("source sample rate " + std::to_string(source.sample_rate()) +
                      " differs from RIR sample rate " + std::to_string(*rirs.sample_rate()));
  }
  std::size_t longest = 0;
  for (const auto& ch : rirs.layout()) longest = std::max(longest, rirs.at(angle_deg, ch).size());
  const std::size_t out_len = source.empty() ? 0 : source.size() + longest - 1;

  std::vector<Waveform> channels;
  channels.reserve(rirs.layout().size());
  for (const auto& ch : rirs.layout()) {
    auto y = convolve(source.samples(), rirs.at(angle_deg, ch).samples());
    y.resize(out_len, 0.0);
    channels.emplace_back(std::move(y), source.sample_rate());
  }
  return MultichannelWaveform(std::move(channels), rirs.layout());
}

void ActivityDetectorConfig::validate() const {
  if (frame_length == 0) throw ConfigError("activity detector frame_length must be positive");
  if (!(threshold_db > 0.0) || !std::isfinite(threshold_db)) {
    throw ConfigError("activity detector threshold_db must be positive");
  }
}

std::size_t ActivityMask::active_count() const noexcept {
  return static_cast<std::size_t>(std::count(frames.begin(), frames.end(), true));
}

double ActivityMask::active_energy(const Waveform& signal) const {
  if (signal.size() < signal_length) {
    throw DimensionError("signal shorter than the activity mask (" +
                         std::to_string(signal.size()) + " < " + std::to_string(signal_length) +
                         ")");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (!frames[k]) continue;
    const std::size_t begin = k * frame_length;
    const std::size_t end = std::min(begin + frame_length, signal_length);
    acc += signal.energy(begin, end);
  }
  return acc;
}

ActivityMask detect_activity(const Waveform& speech, const ActivityDetectorConfig& config) {
  config.validate();
  if (speech.empty()) throw InvalidArgument("detect_activity: empty signal");
  const std::size_t n = speech.size();
  const std::size_t count = (n + config.frame_length - 1) / config.frame_length;
  std::vector<double> energies(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t begin = k * config.frame_length;
    energies[k] = speech.energy(begin, std::min(begin + config.frame_length, n));
  }
  const double loudest = *std::max_element(energies.begin(), energies.end());
  if (!(loudest > 0.0)) {
    throw InvalidArgument("detect_activity: signal is all zeros, SNR is undefined");
  }
  const double threshold = loudest * std::pow(10.0, -config.threshold_db / 10.0);
  ActivityMask mask{std::vector<bool>(count), config.frame_length, n};
  for (std::size_t k = 0; k < count; ++k) mask.frames[k] = energies[k] >= threshold;
  return mask;
}

double noise_gain_for_snr(const Waveform& speech, const Waveform& noise, double target_snr_db,
                          const ActivityMask& activity) {
  if (!std::isfinite(target_snr_db)) throw InvalidArgument("target SNR must be finite");
  const double es = activity.active_energy(speech);
  const double en = activity.active_energy(noise);
  if (!(es > 0.0)) throw InvalidArgument("speech has no energy over active frames");
  if (!(en > 0.0)) throw InvalidArgument("noise has no energy over speech-active frames");
  return std::sqrt(es / en) * std::pow(10.0, -target_snr_db / 20.0);
}

double active_snr_db(const Waveform& speech, const Waveform& noise,
                     const ActivityMask& activity) {
  return 10.0 * std::log10(activity.active_energy(speech) / activity.active_energy(noise));
}

Scene mix_scene(const Waveform& speech, const Waveform& noise, const RirSet& rirs,
                const SceneGeometry& geometry) {
  if (noise.size() != speech.size()) {
    throw DimensionError("noise must be trimmed or tiled to the speech length before mixing");
  }
  if (noise.sample_rate() != speech.sample_rate()) {
    throw FormatError("speech and noise sample rates differ");
  }
  Scene scene;
  scene.dry_length = speech.size();
  scene.activity = detect_activity(speech, geometry.detector);
  scene.applied_noise_gain =
      noise_gain_for_snr(speech, noise, geometry.target_snr_db, scene.activity);
  auto speech_image = convolve_rir(speech, rirs, geometry.speech_angle_deg);
  auto noise_image =
      convolve_rir(noise.scaled(scene.applied_noise_gain), rirs, geometry.noise_angle_deg);
  const std::size_t length = std::max(speech_image.length(), noise_image.length());
  scene.speech_image = speech_image.resized(length);
  scene.noise_image = noise_image.resized(length);
  scene.mixture = scene.speech_image + scene.noise_image;
  return scene;
}

Scene build_scene(const SceneConfig& config) {
  if (config.rir_set == nullptr) throw ConfigError("scene config has no RIR set");
  const auto speech = read_wav_mono(config.speech_path);
  NoiseSpec spec = config.noise;
  spec.duration = speech.size();
  spec.seed = derive_seed(config.seed, "noise");
  const auto noise = make_noise(spec, speech.sample_rate());
  return mix_scene(speech, noise, *config.rir_set, config.geometry);
}

}  // namespace phoneval
