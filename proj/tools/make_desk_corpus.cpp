// Writes the small synthetic corpus under data/desk: ten phone-sequence "utterances" with
// exact alignments, a longer donor for speech-shaped noise, 4-channel RIRs and a config.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phoneval/fft.hpp"
#include "phoneval/random.hpp"
#include "phoneval/scene.hpp"
#include "phoneval/wav.hpp"

namespace fs = std::filesystem;
using phoneval::Rng;

namespace {

constexpr int kFs = 16000;

enum class Kind { Vowel, Nasal, Liquid, Tap, Sibilant, Fricative, Plosive, Affricate, Glottal };

struct PhoneDef {
  Kind kind;
  std::array<double, 3> formants;  // vowels and sonorants
  double band_lo = 0.0;            // frication band
  double band_hi = 0.0;
  bool voiced = false;
  double level = 1.0;
};

const std::map<std::string, PhoneDef>& phone_table() {
  static const std::map<std::string, PhoneDef> table = {
      {"i", {Kind::Vowel, {280, 2250, 2900}, 0, 0, true, 1.0}},
      {"ɪ", {Kind::Vowel, {400, 1900, 2550}, 0, 0, true, 1.0}},
      {"e", {Kind::Vowel, {450, 2050, 2650}, 0, 0, true, 1.0}},
      {"ej", {Kind::Vowel, {480, 2000, 2600}, 0, 0, true, 1.0}},
      {"ɛ", {Kind::Vowel, {580, 1800, 2500}, 0, 0, true, 1.0}},
      {"æ", {Kind::Vowel, {690, 1650, 2450}, 0, 0, true, 1.0}},
      {"ə", {Kind::Vowel, {500, 1500, 2500}, 0, 0, true, 0.8}},
      {"ʌ", {Kind::Vowel, {620, 1200, 2550}, 0, 0, true, 1.0}},
      {"ɑ", {Kind::Vowel, {750, 1100, 2450}, 0, 0, true, 1.0}},
      {"aj", {Kind::Vowel, {720, 1300, 2500}, 0, 0, true, 1.0}},
      {"aw", {Kind::Vowel, {700, 1150, 2450}, 0, 0, true, 1.0}},
      {"ɔ", {Kind::Vowel, {580, 880, 2550}, 0, 0, true, 1.0}},
      {"ow", {Kind::Vowel, {470, 950, 2500}, 0, 0, true, 1.0}},
      {"ʊ", {Kind::Vowel, {440, 1050, 2350}, 0, 0, true, 0.9}},
      {"u", {Kind::Vowel, {320, 900, 2300}, 0, 0, true, 0.9}},
      {"m", {Kind::Nasal, {250, 1100, 2300}, 0, 0, true, 0.45}},
      {"n", {Kind::Nasal, {250, 1600, 2600}, 0, 0, true, 0.45}},
      {"ŋ", {Kind::Nasal, {250, 2000, 2800}, 0, 0, true, 0.4}},
      {"l", {Kind::Liquid, {360, 1100, 2700}, 0, 0, true, 0.6}},
      {"ɹ", {Kind::Liquid, {420, 1300, 1650}, 0, 0, true, 0.6}},
      {"w", {Kind::Liquid, {300, 700, 2200}, 0, 0, true, 0.55}},
      {"j", {Kind::Liquid, {280, 2200, 3000}, 0, 0, true, 0.55}},
      {"ɾ", {Kind::Tap, {450, 1600, 2600}, 0, 0, true, 0.35}},
      {"s", {Kind::Sibilant, {}, 4500, 7800, false, 0.35}},
      {"z", {Kind::Sibilant, {}, 4500, 7800, true, 0.3}},
      {"ʃ", {Kind::Sibilant, {}, 2200, 6000, false, 0.35}},
      {"f", {Kind::Fricative, {}, 1200, 7800, false, 0.12}},
      {"v", {Kind::Fricative, {}, 1200, 7000, true, 0.15}},
      {"θ", {Kind::Fricative, {}, 1500, 7800, false, 0.1}},
      {"ð", {Kind::Fricative, {}, 1500, 7000, true, 0.15}},
      {"h", {Kind::Fricative, {}, 500, 4000, false, 0.12}},
      {"p", {Kind::Plosive, {}, 300, 3000, false, 0.5}},
      {"b", {Kind::Plosive, {}, 300, 2500, true, 0.4}},
      {"t", {Kind::Plosive, {}, 2500, 7500, false, 0.5}},
      {"d", {Kind::Plosive, {}, 2000, 6000, true, 0.4}},
      {"k", {Kind::Plosive, {}, 1200, 4000, false, 0.5}},
      {"ɡ", {Kind::Plosive, {}, 1000, 3500, true, 0.4}},
      {"tʃ", {Kind::Affricate, {}, 2200, 6500, false, 0.35}},
      {"dʒ", {Kind::Affricate, {}, 2000, 6000, true, 0.3}},
      {"ʔ", {Kind::Glottal, {}, 0, 0, false, 0.2}},
  };
  return table;
}

// Each entry is a phone sequence between leading and trailing silences.
const std::vector<std::vector<std::string>>& sentences() {
  static const std::vector<std::vector<std::string>> s = {
      {"ð", "ə", "k", "æ", "t", "s", "æ", "t", "ɑ", "n", "ɪ", "t"},
      {"s", "ʌ", "n", "z", "ɪ", "z", "h", "ɑ", "t", "s", "ow"},
      {"ʃ", "i", "s", "ɛ", "l", "z", "s", "i", "ʃ", "ɛ", "l", "z"},
      {"b", "ɹ", "aj", "t", "m", "u", "n", "l", "aj", "t"},
      {"w", "ɛ", "n", "ð", "ə", "w", "ɪ", "n", "d", "ɪ", "z", "ɡ", "ɔ", "n"},
      {"tʃ", "ɪ", "p", "s", "ə", "n", "d", "dʒ", "ɛ", "l", "i"},
      {"f", "ɔ", "ɹ", "θ", "ɪ", "ŋ", "k", "s", "ʊ", "ɾ", "ə", "v"},
      {"j", "u", "s", "ej", "s", "ʌ", "m", "θ", "ɪ", "ŋ", "ʔ", "ɛ", "s"},
      {"k", "aw", "n", "t", "ð", "ə", "s", "t", "ɑ", "ɹ", "z", "ɛ", "ɾ", "i"},
      {"h", "æ", "v", "ə", "n", "aj", "s", "d", "ej", "f", "ɛ", "l", "ow"},
  };
  return s;
}

// Two-pole resonator bank, unit gain at the centre frequency up to a constant.
std::vector<double> resonate(const std::vector<double>& x, const std::array<double, 3>& formants) {
  std::vector<double> y(x.size(), 0.0);
  const std::array<double, 3> bandwidths = {80.0, 110.0, 160.0};
  const std::array<double, 3> gains = {1.0, 0.6, 0.35};
  for (std::size_t f = 0; f < 3; ++f) {
    const double r = std::exp(-std::numbers::pi * bandwidths[f] / kFs);
    const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * formants[f] / kFs);
    const double a2 = -r * r;
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double v = (1.0 - r) * x[n] + a1 * y1 + a2 * y2;
      y2 = y1;
      y1 = v;
      y[n] += gains[f] * v;
    }
  }
  return y;
}

std::vector<double> glottal(std::size_t n, double f0, double& phase) {
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    phase += f0 / kFs;
    if (phase >= 1.0) {
      phase -= 1.0;
      x[i] = 1.0;
    }
  }
  return x;
}

std::vector<double> band_noise(std::size_t n, double lo, double hi, Rng& rng) {
  if (n == 0) return {};
  const std::size_t len = n < 2 ? 2 : n;
  std::vector<double> x(len);
  for (auto& v : x) v = rng.gaussian();
  phoneval::RealFft fft(len);
  std::vector<phoneval::Complex> spec(fft.bins());
  fft.forward(x, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * kFs / static_cast<double>(len);
    if (f < lo || f > hi) spec[k] = 0.0;
  }
  fft.inverse(spec, x);
  double rms = 0.0;
  for (auto& v : x) {
    v /= static_cast<double>(len);
    rms += v * v;
  }
  rms = std::sqrt(rms / static_cast<double>(len));
  for (auto& v : x) v = rms > 0 ? v / rms : 0.0;
  x.resize(n);
  return x;
}

void apply_ramp(std::vector<double>& x, std::size_t ramp) {
  ramp = std::min(ramp, x.size() / 2);
  for (std::size_t i = 0; i < ramp; ++i) {
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / ramp);
    x[i] *= w;
    x[x.size() - 1 - i] *= w;
  }
}

double rms_of(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return x.empty() ? 0.0 : std::sqrt(e / static_cast<double>(x.size()));
}

void normalize_rms(std::vector<double>& x, double target) {
  const double r = rms_of(x);
  if (r > 0) {
    for (auto& v : x) v *= target / r;
  }
}

std::vector<double> synth_phone(const PhoneDef& def, std::size_t n, Rng& rng, double& phase,
                                double f0) {
  std::vector<double> out(n, 0.0);
  const auto voicing = [&](std::size_t len, const std::array<double, 3>& formants) {
    auto v = resonate(glottal(len, f0, phase), formants);
    normalize_rms(v, 1.0);
    return v;
  };
  switch (def.kind) {
    case Kind::Vowel:
    case Kind::Nasal:
    case Kind::Liquid:
    case Kind::Tap: {
      out = voicing(n, def.formants);
      normalize_rms(out, def.level * 0.12);
      break;
    }
    case Kind::Sibilant:
    case Kind::Fricative: {
      out = band_noise(n, def.band_lo, def.band_hi, rng);
      normalize_rms(out, def.level * 0.12);
      if (def.voiced) {
        auto v = voicing(n, {250, 1500, 2500});
        for (std::size_t i = 0; i < n; ++i) out[i] += 0.03 * v[i];
      }
      break;
    }
    case Kind::Plosive:
    case Kind::Affricate: {
      // closure, burst, then aspiration or frication
      const std::size_t closure = n * 2 / 5;
      const std::size_t burst = std::min<std::size_t>(n - closure, 160);
      const std::size_t rest = n - closure - burst;
      if (def.voiced) {
        auto v = voicing(closure, {200, 1000, 2500});
        for (std::size_t i = 0; i < closure; ++i) out[i] = 0.01 * v[i];
      }
      auto b = band_noise(burst, 200, 7800, rng);
      for (std::size_t i = 0; i < burst; ++i) {
        out[closure + i] = def.level * 0.2 * b[i] * std::exp(-static_cast<double>(i) / 60.0);
      }
      auto tail = band_noise(rest, def.band_lo, def.band_hi, rng);
      const double tail_level = def.kind == Kind::Affricate ? def.level * 0.12 : def.level * 0.03;
      for (std::size_t i = 0; i < rest; ++i) out[closure + burst + i] = tail_level * tail[i];
      break;
    }
    case Kind::Glottal: {
      auto v = voicing(n, {500, 1500, 2500});
      for (std::size_t i = 0; i < n; ++i) out[i] = def.level * 0.05 * v[i];
      break;
    }
  }
  apply_ramp(out, 48);
  return out;
}

double phone_duration(const PhoneDef& def, Rng& rng) {
  switch (def.kind) {
    case Kind::Vowel: return 0.090 + 0.070 * rng.uniform();
    case Kind::Tap: return 0.035;
    case Kind::Glottal: return 0.020;
    case Kind::Plosive: return 0.070 + 0.030 * rng.uniform();
    case Kind::Affricate: return 0.100 + 0.030 * rng.uniform();
    default: return 0.070 + 0.050 * rng.uniform();
  }
}

struct Utt {
  std::vector<double> samples;
  std::vector<std::tuple<std::string, double, double>> rows;
};

Utt synth_sentence(const std::vector<std::string>& phones, std::uint64_t seed) {
  Rng rng(seed);
  Utt u;
  double phase = 0.0;
  const double f0 = 105.0 + 40.0 * rng.uniform();
  const auto push_silence = [&](double seconds) {
    const double start = static_cast<double>(u.samples.size()) / kFs;
    u.samples.resize(u.samples.size() + static_cast<std::size_t>(std::lround(seconds * kFs)), 0.0);
    u.rows.emplace_back("sil", start, static_cast<double>(u.samples.size()) / kFs);
  };
  push_silence(0.20);
  for (const auto& p : phones) {
    const auto& def = phone_table().at(p);
    // whole milliseconds so the alignment times print exactly
    const auto n = static_cast<std::size_t>(std::lround(phone_duration(def, rng) * 1000.0)) * 16;
    const double start = static_cast<double>(u.samples.size()) / kFs;
    auto seg = synth_phone(def, n, rng, phase, f0);
    u.samples.insert(u.samples.end(), seg.begin(), seg.end());
    u.rows.emplace_back(p, start, static_cast<double>(u.samples.size()) / kFs);
  }
  push_silence(0.25);
  return u;
}

void write_pcm16(const std::vector<double>& x, const fs::path& path) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  std::vector<double> scaled(x);
  if (peak > 0.9) {
    for (auto& v : scaled) v *= 0.9 / peak;
  }
  phoneval::write_wav(phoneval::Waveform(std::move(scaled), kFs), path,
                      phoneval::WavEncoding::Pcm16);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic desk-scale corpus"};
  std::string out_dir = "data/desk";
  std::uint64_t seed = 20240501;
  app.add_option("output", out_dir, "Destination directory");
  app.add_option("--seed", seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out_dir);
  fs::create_directories(root / "speech");
  fs::create_directories(root / "alignments");

  char id[16];
  for (std::size_t i = 0; i < sentences().size(); ++i) {
    std::snprintf(id, sizeof id, "desk%02zu", i + 1);
    auto u = synth_sentence(sentences()[i], phoneval::derive_seed(seed, id));
    write_pcm16(u.samples, root / "speech" / (std::string(id) + ".wav"));
    std::ofstream csv(root / "alignments" / (std::string(id) + ".csv"));
    csv << "phoneme,start,end\n";
    char line[96];
    for (const auto& [label, start, end] : u.rows) {
      std::snprintf(line, sizeof line, ",%.3f,%.3f\n", start, end);
      csv << label << line;
    }
  }

  // Donor: every sentence back to back with fresh durations.
  std::vector<double> donor;
  for (std::size_t i = 0; i < sentences().size(); ++i) {
    auto u = synth_sentence(sentences()[i], phoneval::derive_seed(seed, "donor" + std::to_string(i)));
    donor.insert(donor.end(), u.samples.begin(), u.samples.end());
  }
  write_pcm16(donor, root / "donor.wav");

  // Speech from the front; the noise reaches the right pair first and louder.
  const std::vector<phoneval::RirTap> taps = {
      {0, "L1", 3, 1.0},   {0, "L2", 4, 1.0},   {0, "R1", 3, 1.0},   {0, "R2", 4, 1.0},
      {45, "L1", 10, 0.5}, {45, "L2", 11, 0.5}, {45, "R1", 2, 1.0},  {45, "R2", 3, 1.0},
      {90, "L1", 12, 0.4}, {90, "L2", 13, 0.4}, {90, "R1", 1, 1.0},  {90, "R2", 2, 1.0},
  };
  phoneval::DecayTail tail;
  tail.time_constant_s = 0.02;
  tail.relative_gain = 0.02;
  tail.length_s = 0.1;
  tail.seed = phoneval::derive_seed(seed, "rir");
  phoneval::synth_test_rirs(taps, tail, kFs).save(root / "rirs");

  std::ofstream conf(root / "desk.conf");
  conf << "# Desk-scale run over the bundled synthetic corpus.\n"
          "speech_dir = speech\n"
          "alignment_dir = alignments\n"
          "rir_root = rirs\n"
          "noise_kinds = white, speech_shaped\n"
          "speech_shaped.donor = donor.wav\n"
          "snr_list = -5, 0, 5\n"
          "angle_list = 45\n"
          "algorithms = mvdr, mwf, gevd_mwf\n"
          "ears = L, R\n"
          "category_map = ../category_map.csv\n"
          "output_dir = results\n"
          "master_seed = 7\n"
          "workers = 4\n";
  std::cout << "wrote desk corpus to " << root << "\n";
  return 0;
}
