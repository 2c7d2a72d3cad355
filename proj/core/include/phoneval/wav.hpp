#pragma once

#include <filesystem>

#include "phoneval/waveform.hpp"

namespace phoneval {

enum class WavEncoding { Pcm16, Float32 };

/// PCM16 samples are mapped to [-1, 1) by dividing by this value.
inline constexpr double kPcm16Scale = 32768.0;

/// Reads a RIFF/WAVE file holding PCM16 or IEEE float32 samples (any channel count).
/// Channels are labelled "0", "1", ... in file order.
MultichannelWaveform read_wav(const std::filesystem::path& path);

/// Reads a file that must hold exactly one channel.
Waveform read_wav_mono(const std::filesystem::path& path);

/// Writes `signal` to `path`. Float32 round-trips any float-representable sample exactly.
/// PCM16 refuses samples that would clip instead of saturating them.
void write_wav(const MultichannelWaveform& signal, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::Float32);
void write_wav(const Waveform& signal, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::Float32);

}  // namespace phoneval
