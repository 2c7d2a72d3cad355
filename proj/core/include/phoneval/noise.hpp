#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "phoneval/fft.hpp"
#include "phoneval/waveform.hpp"

namespace phoneval {

enum class NoiseKind { White, SpeechShaped, Recorded };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// Recipe for one interferer realisation.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::White;
  /// Donor (speech_shaped) or recording (recorded).
  std::optional<std::filesystem::path> source_path;
  std::uint64_t seed = 0;
  std::size_t duration = 0;

  void validate() const;
};

/// I.i.d. standard normal samples, deterministic in `seed`.
Waveform white_noise(std::size_t duration, std::uint64_t seed,
                     int sample_rate = kDefaultSampleRate);

/// Full-length DFT of `donor` with magnitudes kept, interior phases replaced by
/// uniform draws on [0, 2pi), conjugate-mirrored; DC and Nyquist keep their (real) values.
std::vector<Complex> phase_randomized_spectrum(const Waveform& donor, std::uint64_t seed);

/// Speech-shaped noise: inverse DFT of phase_randomized_spectrum. Same length as the donor.
Waveform speech_shaped_noise(const Waveform& donor, std::uint64_t seed);

/// Mono excerpt [offset, offset + duration) of a recording, wrapping around the file end.
/// Multichannel recordings are averaged across channels first.
Waveform load_recorded_noise(const std::filesystem::path& path, std::size_t duration,
                             std::size_t offset);

/// Repeats (or truncates) `signal` to exactly `duration` samples starting at `offset`.
Waveform tile(const Waveform& signal, std::size_t duration, std::size_t offset = 0);

/// Realises a NoiseSpec. Recorded excerpts start at seed % file length.
Waveform make_noise(const NoiseSpec& spec, int sample_rate = kDefaultSampleRate);

}  // namespace phoneval
