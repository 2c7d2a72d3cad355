#include "phoneval/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "phoneval/error.hpp"
#include "phoneval/random.hpp"
#include "phoneval/wav.hpp"

namespace phoneval {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::White: return "white";
    case NoiseKind::SpeechShaped: return "speech_shaped";
    case NoiseKind::Recorded: return "recorded";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "white") return NoiseKind::White;
  if (name == "speech_shaped" || name == "ssn") return NoiseKind::SpeechShaped;
  if (name == "recorded" || name == "babble") return NoiseKind::Recorded;
  throw ConfigError("unknown noise kind '" + std::string(name) +
                    "' (expected white, speech_shaped or recorded)");
}

void NoiseSpec::validate() const {
  if (duration == 0) throw InvalidArgument("noise duration must be positive");
  if (kind != NoiseKind::White && !source_path) {
    throw ConfigError(std::string(to_string(kind)) + " noise requires a source file");
  }
}

Waveform white_noise(std::size_t duration, std::uint64_t seed, int sample_rate) {
  if (duration == 0) throw InvalidArgument("white_noise: duration must be positive");
  Rng rng(seed);
  std::vector<double> out(duration);
  for (double& v : out) v = rng.gaussian();
  return Waveform(std::move(out), sample_rate);
}

std::vector<Complex> phase_randomized_spectrum(const Waveform& donor, std::uint64_t seed) {
  const std::size_t n = donor.size();
  if (n < 2) throw InvalidArgument("speech_shaped_noise: donor needs at least 2 samples");
  const ComplexFft fft(n);
  std::vector<Complex> x(n), spectrum(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = donor[i];
  fft.forward(x, spectrum);

  Rng rng(seed);
  spectrum[0] = Complex(spectrum[0].real(), 0.0);
  const std::size_t half = (n - 1) / 2;  // interior bins 1..half have distinct mirrors
  for (std::size_t k = 1; k <= half; ++k) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    spectrum[k] = std::polar(std::abs(spectrum[k]), phase);
    spectrum[n - k] = std::conj(spectrum[k]);
  }
  if (n % 2 == 0) spectrum[n / 2] = Complex(spectrum[n / 2].real(), 0.0);
  return spectrum;
}

Waveform speech_shaped_noise(const Waveform& donor, std::uint64_t seed) {
  const auto spectrum = phase_randomized_spectrum(donor, seed);
  const std::size_t n = spectrum.size();
  const ComplexFft fft(n);
  std::vector<Complex> time(n);
  fft.inverse(spectrum, time);
  std::vector<double> out(n);
  double peak = 0.0;
  double worst_imag = 0.0;
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = time[i].real() * scale;
    peak = std::max(peak, std::abs(out[i]));
    worst_imag = std::max(worst_imag, std::abs(time[i].imag() * scale));
  }
  if (worst_imag > 1e-9 * peak) {
    throw NumericalError("speech_shaped_noise: inverse DFT left an imaginary residual of " +
                         std::to_string(worst_imag));
  }
  return Waveform(std::move(out), donor.sample_rate());
}

Waveform tile(const Waveform& signal, std::size_t duration, std::size_t offset) {
  if (signal.empty()) throw InvalidArgument("cannot tile an empty signal");
  std::vector<double> out(duration);
  const std::size_t n = signal.size();
  for (std::size_t i = 0; i < duration; ++i) out[i] = signal[(offset + i) % n];
  return Waveform(std::move(out), signal.sample_rate());
}

Waveform load_recorded_noise(const std::filesystem::path& path, std::size_t duration,
                             std::size_t offset) {
  const auto rec = read_wav(path);
  if (rec.length() == 0) throw FormatError(path.string() + ": recording is empty");
  std::vector<double> mono(rec.length(), 0.0);
  for (const auto& ch : rec.channels()) {
    for (std::size_t i = 0; i < mono.size(); ++i) mono[i] += ch[i];
  }
  const double inv = 1.0 / static_cast<double>(rec.num_channels());
  for (double& v : mono) v *= inv;
  return tile(Waveform(std::move(mono), rec.sample_rate()), duration, offset % rec.length());
}

Waveform make_noise(const NoiseSpec& spec, int sample_rate) {
  spec.validate();
  switch (spec.kind) {
    case NoiseKind::White: return white_noise(spec.duration, spec.seed, sample_rate);
    case NoiseKind::SpeechShaped: {
      const auto donor = read_wav_mono(*spec.source_path);
      if (donor.sample_rate() != sample_rate) {
        throw FormatError(spec.source_path->string() + ": donor sample rate " +
                          std::to_string(donor.sample_rate()) + " differs from " +
                          std::to_string(sample_rate));
      }
      return tile(speech_shaped_noise(donor, spec.seed), spec.duration);
    }
    case NoiseKind::Recorded: {
      const auto probe = read_wav(*spec.source_path);
      if (probe.sample_rate() != sample_rate) {
        throw FormatError(spec.source_path->string() + ": recording sample rate " +
                          std::to_string(probe.sample_rate()) + " differs from " +
                          std::to_string(sample_rate));
      }
      const std::size_t offset = probe.length() == 0 ? 0 : spec.seed % probe.length();
      return load_recorded_noise(*spec.source_path, spec.duration, offset);
    }
  }
  throw InvalidArgument("unhandled noise kind");
}

}  // namespace phoneval
