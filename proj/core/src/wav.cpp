#include "phoneval/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "phoneval/error.hpp"

namespace phoneval {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<unsigned char>(v >> shift));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

}  // namespace

MultichannelWaveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& what) {
    throw FormatError(path.string() + ": " + what);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("not a RIFF/WAVE file");
  }

  FormatChunk fmt;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Truncated data chunks from streaming writers: take what is present.
      if (std::memcmp(chunk, "data", 4) == 0) {
        data = bytes.data() + body;
        data_size = bytes.size() - body;
        break;
      }
      fail("chunk extends past end of file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) fail("fmt chunk too short");
      const unsigned char* f = bytes.data() + body;
      fmt.format = get_u16(f);
      fmt.channels = get_u16(f + 2);
      fmt.sample_rate = get_u32(f + 4);
      fmt.block_align = get_u16(f + 12);
      fmt.bits = get_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        if (size < 40) fail("extensible fmt chunk too short");
        fmt.format = get_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) fail("missing fmt chunk");
  if (data == nullptr) fail("missing data chunk");
  if (fmt.channels == 0) fail("zero channels");
  if (fmt.sample_rate == 0) fail("zero sample rate");

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32) {
    throw FormatError(path.string() + ": unsupported encoding (format " +
                      std::to_string(fmt.format) + ", " + std::to_string(fmt.bits) +
                      " bits); expected PCM16 or float32");
  }
  const std::size_t bytes_per_sample = fmt.bits / 8;
  if (fmt.block_align != bytes_per_sample * fmt.channels) fail("inconsistent block alignment");
  const std::size_t frames = data_size / fmt.block_align;

  std::vector<std::vector<double>> channels(fmt.channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      const unsigned char* p = data + i * fmt.block_align + c * bytes_per_sample;
      if (pcm16) {
        const auto raw = static_cast<std::int16_t>(get_u16(p));
        channels[c][i] = static_cast<double>(raw) / kPcm16Scale;
      } else {
        channels[c][i] = static_cast<double>(std::bit_cast<float>(get_u32(p)));
      }
    }
  }
  std::vector<Waveform> waves;
  waves.reserve(channels.size());
  for (auto& ch : channels) {
    waves.emplace_back(std::move(ch), static_cast<int>(fmt.sample_rate));
  }
  return MultichannelWaveform(std::move(waves));
}

Waveform read_wav_mono(const std::filesystem::path& path) {
  auto wav = read_wav(path);
  if (wav.num_channels() != 1) {
    throw FormatError(path.string() + ": expected 1 channel, found " +
                      std::to_string(wav.num_channels()));
  }
  return wav.channel(0);
}

void write_wav(const MultichannelWaveform& signal, const std::filesystem::path& path,
               WavEncoding encoding) {
  const auto channels = static_cast<std::uint16_t>(signal.num_channels());
  if (channels == 0) throw InvalidArgument("cannot write a WAV file with zero channels");
  const bool pcm16 = encoding == WavEncoding::Pcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::size_t frames = signal.length();
  const std::size_t data_size = frames * block_align;
  if (data_size > 0xFFFFFFF0U) throw InvalidArgument("signal too long for a RIFF file");

  std::vector<unsigned char> out;
  out.reserve(64 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 0);  // patched below
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, pcm16 ? 16 : 18);
  put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate()));
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate()) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  if (!pcm16) {
    put_u16(out, 0);
    put_tag(out, "fact");
    put_u32(out, 4);
    put_u32(out, static_cast<std::uint32_t>(frames));
  }
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_size));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = signal.channel(c)[i];
      if (pcm16) {
        const double q = std::nearbyint(v * kPcm16Scale);
        if (q < -32768.0 || q > 32767.0) {
          throw InvalidArgument("sample " + std::to_string(i) + " of channel " +
                                std::to_string(c) + " (" + std::to_string(v) +
                                ") would clip in PCM16");
        }
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  const auto riff_size = static_cast<std::uint32_t>(out.size() - 8);
  for (int k = 0; k < 4; ++k) out[4 + k] = static_cast<unsigned char>(riff_size >> (8 * k));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing " + path.string());
}

void write_wav(const Waveform& signal, const std::filesystem::path& path, WavEncoding encoding) {
  write_wav(MultichannelWaveform({signal}), path, encoding);
}

}  // namespace phoneval
