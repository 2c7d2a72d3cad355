#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phoneval/noise.hpp"
#include "phoneval/waveform.hpp"

namespace phoneval {

/// Microphone labels of the two-device, four-microphone hearing-aid array.
/// Index 0 of each pair is the front microphone.
inline const std::array<std::string, 4> kBinauralLayout = {"L1", "L2", "R1", "R2"};

/// Impulse responses keyed by (source angle in degrees, channel label).
class RirSet {
 public:
  RirSet() = default;
  explicit RirSet(std::vector<std::string> layout) : layout_(std::move(layout)) {}

  /// Adds or replaces one response. The label must belong to the layout.
  void add(int angle_deg, const std::string& channel, Waveform response);

  [[nodiscard]] const Waveform& at(int angle_deg, const std::string& channel) const;
  [[nodiscard]] bool has_angle(int angle_deg) const noexcept;
  /// True when every layout channel has a response at this angle.
  [[nodiscard]] bool complete(int angle_deg) const noexcept;
  [[nodiscard]] std::vector<int> angles() const;
  [[nodiscard]] const std::vector<std::string>& layout() const noexcept { return layout_; }
  [[nodiscard]] std::optional<int> sample_rate() const noexcept { return sample_rate_; }

  /// Loads `<root>/<angle>/<channel>.wav` for each requested angle and layout label.
  static RirSet load(const std::filesystem::path& root, std::span<const int> angles,
                     std::vector<std::string> layout = {kBinauralLayout.begin(),
                                                        kBinauralLayout.end()});
  /// Writes the same directory convention (float32 WAV).
  void save(const std::filesystem::path& root) const;

 private:
  std::vector<std::string> layout_;
  std::map<std::pair<int, std::string>, Waveform> entries_;
  std::optional<int> sample_rate_;
};

/// One direct-path tap of a synthetic response.
struct RirTap {
  int angle_deg = 0;
  std::string channel;
  long delay = 0;
  double gain = 1.0;
};

/// Exponentially decaying random-sign tail appended after the direct path.
/// Tail amplitude at lag k after the direct path is gain * relative_gain * exp(-k / (tau * fs)).
struct DecayTail {
  double time_constant_s = 0.05;
  double relative_gain = 0.1;
  double length_s = 0.2;
  std::uint64_t seed = 0;
};

/// Desk-scale stand-in for measured responses: gain * delta(t - delay) plus an optional tail.
RirSet synth_test_rirs(std::span<const RirTap> taps, const std::optional<DecayTail>& tail,
                       int sample_rate = kDefaultSampleRate,
                       std::vector<std::string> layout = {kBinauralLayout.begin(),
                                                          kBinauralLayout.end()});

/// Convolves a dry source with every layout channel at `angle_deg`. Channels are
/// zero-padded to source length + longest response - 1.
MultichannelWaveform convolve_rir(const Waveform& source, const RirSet& rirs, int angle_deg);

struct ActivityDetectorConfig {
  std::size_t frame_length = 320;
  double threshold_db = 40.0;

  void validate() const;
};

/// Per-frame speech activity over consecutive, non-overlapping frames (last frame may be short).
struct ActivityMask {
  std::vector<bool> frames;
  std::size_t frame_length = 0;
  std::size_t signal_length = 0;

  [[nodiscard]] std::size_t active_count() const noexcept;
  /// Sum of squared samples of `signal` over active frames.
  [[nodiscard]] double active_energy(const Waveform& signal) const;
};

/// Frame is active iff its energy >= loudest frame energy * 10^(-threshold_db/10).
ActivityMask detect_activity(const Waveform& speech, const ActivityDetectorConfig& config = {});

/// Gain g with 10 log10(E_active(speech) / (g^2 E_active(noise))) = target_snr_db.
double noise_gain_for_snr(const Waveform& speech, const Waveform& noise, double target_snr_db,
                          const ActivityMask& activity);

/// Active-segment SNR of two dry signals in dB.
double active_snr_db(const Waveform& speech, const Waveform& noise, const ActivityMask& activity);

struct SceneGeometry {
  int speech_angle_deg = 0;
  int noise_angle_deg = 45;
  double target_snr_db = 0.0;
  ActivityDetectorConfig detector;
};

struct SceneConfig {
  std::filesystem::path speech_path;
  NoiseSpec noise;
  SceneGeometry geometry;
  const RirSet* rir_set = nullptr;
  std::uint64_t seed = 0;
};

/// Spatialised mixture at the microphones. mixture == speech_image + noise_image.
struct Scene {
  MultichannelWaveform speech_image;
  MultichannelWaveform noise_image;
  MultichannelWaveform mixture;
  double applied_noise_gain = 0.0;
  ActivityMask activity;
  std::size_t dry_length = 0;

  [[nodiscard]] int sample_rate() const noexcept { return mixture.sample_rate(); }
  [[nodiscard]] std::size_t length() const noexcept { return mixture.length(); }
};

/// Calibrates `noise` (already speech length) against `speech` on dry signals, spatialises
/// both and sums the images.
Scene mix_scene(const Waveform& speech, const Waveform& noise, const RirSet& rirs,
                const SceneGeometry& geometry);

/// Loads the speech file, realises the noise with a seed derived from cfg.seed and mixes.
Scene build_scene(const SceneConfig& config);

}  // namespace phoneval
