#include <cstring>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "phoneval/dsp.hpp"
#include "phoneval/error.hpp"
#include "phoneval/fft.hpp"
#include "phoneval/stft.hpp"
#include "phoneval/wav.hpp"
#include "support.hpp"

using namespace phoneval;
using namespace phoneval::testing;

namespace {

void put16(std::vector<unsigned char>& b, unsigned v) {
  b.push_back(v & 0xFF);
  b.push_back((v >> 8) & 0xFF);
}
void put32(std::vector<unsigned char>& b, unsigned long v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
void tag(std::vector<unsigned char>& b, const char* t) { b.insert(b.end(), t, t + 4); }

// Builds a canonical RIFF/WAVE file byte by byte.
std::vector<unsigned char> wav_bytes(unsigned format, unsigned channels, unsigned bits,
                                     const std::vector<unsigned char>& data, unsigned sr = 16000) {
  std::vector<unsigned char> b;
  tag(b, "RIFF");
  put32(b, 36 + data.size());
  tag(b, "WAVE");
  tag(b, "fmt ");
  put32(b, 16);
  put16(b, format);
  put16(b, channels);
  put32(b, sr);
  put32(b, sr * channels * bits / 8);
  put16(b, channels * bits / 8);
  put16(b, bits);
  tag(b, "data");
  put32(b, data.size());
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

void dump(const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST(Waveform, RejectsNonFiniteSamplesAndBadRate) {
  EXPECT_THROW(Waveform({0.0, std::numeric_limits<double>::quiet_NaN()}, 16000), NumericalError);
  EXPECT_THROW(Waveform({0.0, std::numeric_limits<double>::infinity()}, 16000), NumericalError);
  EXPECT_THROW(Waveform({0.0}, 0), InvalidArgument);
  EXPECT_NO_THROW(Waveform({}, 16000));
}

TEST(Waveform, MultichannelInvariants) {
  const Waveform a({1, 2, 3}, 16000), b({1, 2}, 16000), c({1, 2, 3}, 8000);
  EXPECT_THROW(MultichannelWaveform({a, b}, {"L1", "L2"}), DimensionError);
  EXPECT_THROW(MultichannelWaveform({a, c}, {"L1", "L2"}), DimensionError);
  EXPECT_THROW(MultichannelWaveform({a, a}, {"L1"}), DimensionError);
  EXPECT_THROW(MultichannelWaveform({a, a}, {"L1", "L1"}), InvalidArgument);
  const MultichannelWaveform m({a, a.scaled(2.0)}, {"L1", "L2"});
  EXPECT_EQ(m.channel("L2")[2], 6.0);
  const std::vector<std::string> order = {"L2", "L1"};
  EXPECT_EQ(m.select(order).channel(0), a.scaled(2.0));
}

TEST(Wav, Pcm16FullScaleNormalisation) {
  TempDir dir("wav");
  std::vector<unsigned char> data;
  put16(data, 32767);
  put16(data, 0x8000);  // -32768
  put16(data, 0);
  dump(dir.path() / "x.wav", wav_bytes(1, 1, 16, data));
  const auto w = read_wav_mono(dir.path() / "x.wav");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_DOUBLE_EQ(w[0], 32767.0 / 32768.0);
  EXPECT_NEAR(w[0], 0.99997, 1e-5);
  EXPECT_DOUBLE_EQ(w[1], -1.0);
  EXPECT_EQ(w[2], 0.0);
}

TEST(Wav, OneSecondOfPcm16Zeros) {
  TempDir dir("wav");
  dump(dir.path() / "z.wav", wav_bytes(1, 1, 16, std::vector<unsigned char>(32000, 0)));
  const auto w = read_wav(dir.path() / "z.wav");
  ASSERT_EQ(w.num_channels(), 1u);
  EXPECT_EQ(w.length(), 16000u);
  EXPECT_EQ(w.channel(0).energy(), 0.0);
}

TEST(Wav, Float32FourChannelRoundTripIsBitExact) {
  TempDir dir("wav");
  std::vector<Waveform> chans;
  for (int c = 0; c < 4; ++c) {
    auto v = gaussian_vector(1000, 10 + c, 0.3);
    for (auto& x : v) x = static_cast<double>(static_cast<float>(x));
    chans.emplace_back(std::move(v), 16000);
  }
  const MultichannelWaveform m(chans);
  write_wav(m, dir.path() / "f.wav");
  const auto back = read_wav(dir.path() / "f.wav");
  ASSERT_EQ(back.num_channels(), 4u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(back.channel(c), m.channel(c));
}

TEST(Wav, Pcm16RefusesClipping) {
  TempDir dir("wav");
  EXPECT_THROW(write_wav(Waveform({0.5, 1.2}, 16000), dir.path() / "c.wav", WavEncoding::Pcm16),
               InvalidArgument);
  EXPECT_THROW(write_wav(Waveform({1.0}, 16000), dir.path() / "c.wav", WavEncoding::Pcm16),
               InvalidArgument);
  write_wav(Waveform({-1.0, 0.5}, 16000), dir.path() / "ok.wav", WavEncoding::Pcm16);
  const auto w = read_wav_mono(dir.path() / "ok.wav");
  EXPECT_EQ(w[0], -1.0);
  EXPECT_EQ(w[1], 0.5);
}

TEST(Wav, EmptySignalGivesValidFile) {
  TempDir dir("wav");
  write_wav(Waveform({}, 16000), dir.path() / "e.wav");
  const auto w = read_wav_mono(dir.path() / "e.wav");
  EXPECT_TRUE(w.empty());
  EXPECT_EQ(w.sample_rate(), 16000);
}

TEST(Wav, Errors) {
  TempDir dir("wav");
  EXPECT_THROW(read_wav(dir.path() / "missing.wav"), IoError);
  dump(dir.path() / "pcm24.wav", wav_bytes(1, 1, 24, std::vector<unsigned char>(6, 0)));
  EXPECT_THROW(read_wav(dir.path() / "pcm24.wav"), FormatError);
  dump(dir.path() / "junk.wav", {'R', 'I', 'F', 'F', 1, 0, 0, 0, 'A', 'B', 'C', 'D'});
  EXPECT_THROW(read_wav(dir.path() / "junk.wav"), FormatError);
  write_wav(MultichannelWaveform({Waveform({0.0}, 16000), Waveform({0.0}, 16000)}),
            dir.path() / "stereo.wav");
  EXPECT_THROW(read_wav_mono(dir.path() / "stereo.wav"), FormatError);
}

TEST(Fft, RealForwardMatchesDirectDft) {
  for (std::size_t n : {1u, 2u, 7u, 16u, 45u, 128u}) {
    const auto x = gaussian_vector(n, n);
    const auto ref = direct_dft(x);
    RealFft fft(n);
    std::vector<Complex> out(fft.bins());
    fft.forward(x, out);
    for (std::size_t k = 0; k < out.size(); ++k) EXPECT_LT(std::abs(out[k] - ref[k]), 1e-10) << n;
    std::vector<double> back(n);
    fft.inverse(out, back);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i] / static_cast<double>(n), x[i], 1e-12);
  }
}

TEST(Dsp, ConvolutionMatchesDirectOracle) {
  for (auto [na, nb] : {std::pair{5u, 3u}, {100u, 64u}, {3000u, 64u}, {5000u, 700u}}) {
    const auto a = gaussian_vector(na, na), b = gaussian_vector(nb, nb + 1);
    const auto got = convolve(a, b);
    const auto ref = direct_convolution(a, b);
    ASSERT_EQ(got.size(), ref.size());
    EXPECT_LT(relative_l2(got, ref), 1e-12);
  }
  EXPECT_TRUE(convolve(std::vector<double>{}, std::vector<double>{1.0}).empty());
}

TEST(Dsp, CorrelationMatchesDefinition) {
  for (std::size_t n : {40u, 3000u}) {
    const auto a = gaussian_vector(n, 3), b = gaussian_vector(n / 2, 4);
    const auto c = correlate(a, b, -5, 9);
    for (long d = -5; d <= 9; ++d) {
      double acc = 0.0;
      for (long t = 0; t < static_cast<long>(a.size()); ++t) {
        const long j = t - d;
        if (j >= 0 && j < static_cast<long>(b.size())) acc += a[t] * b[j];
      }
      EXPECT_NEAR(c[d + 5], acc, 1e-9 * (1.0 + std::abs(acc)));
    }
  }
}

TEST(Dsp, FirFilterIsTruncatedConvolution) {
  const auto h = gaussian_vector(17, 1), x = gaussian_vector(200, 2);
  const auto y = fir_filter(h, x);
  const auto full = direct_convolution(h, x);
  ASSERT_EQ(y.size(), x.size());
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], full[i], 1e-12);
}

TEST(Stft, ConfigValidation) {
  EXPECT_THROW((StftConfig{512, 0, WindowKind::SqrtHann}.validate()), ConfigError);
  EXPECT_THROW((StftConfig{512, 600, WindowKind::SqrtHann}.validate()), ConfigError);
  // periodic sqrt-Hann at hop = window: the taper vanishes at frame starts
  EXPECT_THROW((StftConfig{512, 512, WindowKind::SqrtHann}.validate()), ConfigError);
  EXPECT_NO_THROW((StftConfig{512, 128, WindowKind::Hann}.validate()));
  EXPECT_EQ(StftConfig{}.num_bins(), 257u);
}

TEST(Stft, FrameCountFollowsPaddedLength) {
  const StftConfig cfg;
  for (std::size_t len : {0u, 1u, 100u, 512u, 513u, 16000u, 16001u}) {
    std::size_t padded = 2 * cfg.front_padding() + len;
    padded = std::max(padded, cfg.window_length);
    padded += (cfg.hop_length - (padded - cfg.window_length) % cfg.hop_length) % cfg.hop_length;
    EXPECT_EQ(cfg.num_frames(len), (padded - cfg.window_length) / cfg.hop_length + 1) << len;
    EXPECT_GE(cfg.num_frames(len), 1u);
  }
}

TEST(Stft, ZeroInZeroOut) {
  const StftConfig cfg;
  const auto spec = stft(Waveform::zeros(3000, 16000), cfg);
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    for (auto v : spec.frame(t)) EXPECT_EQ(v, Complex(0.0));
  }
  const auto back = istft(spec, cfg, 3000, 16000);
  EXPECT_EQ(back.energy(), 0.0);
}

TEST(Stft, ImpulseAtFrameCentreIsFlatWithRectangularWindow) {
  const StftConfig cfg{64, 32, WindowKind::Rectangular};
  // frame 3 covers original samples [3*32 - 32, 3*32 + 32)
  std::vector<double> x(400, 0.0);
  x[3 * 32 - 32 + 32] = 1.0;
  const auto spec = stft(Waveform(x, 16000), cfg);
  for (std::size_t f = 0; f < cfg.num_bins(); ++f) EXPECT_NEAR(std::abs(spec(3, f)), 1.0, 1e-12);
}

TEST(Stft, BinCentredSinusoidAgainstDirectDft) {
  const StftConfig cfg;
  const std::size_t k0 = 20;
  std::vector<double> x(4096);
  for (std::size_t n = 0; n < x.size(); ++n) {
    x[n] = std::cos(2.0 * std::numbers::pi * k0 * n / 512.0);
  }
  const auto spec = stft(Waveform(x, 16000), cfg);
  const std::size_t t = 6;
  const long start = static_cast<long>(t * cfg.hop_length) - static_cast<long>(cfg.front_padding());
  const auto w = cfg.taper();
  std::vector<double> frame(512);
  for (std::size_t i = 0; i < 512; ++i) frame[i] = x[start + i] * w[i];
  const auto ref = direct_dft(frame);
  double peak = 0.0, total = 0.0;
  for (std::size_t f = 0; f < cfg.num_bins(); ++f) {
    EXPECT_LT(std::abs(spec(t, f) - ref[f]), 1e-9);
    total += std::norm(spec(t, f));
    peak = std::max(peak, std::norm(spec(t, f)));
  }
  EXPECT_GT(std::norm(spec(t, k0)), 0.5 * total);
  EXPECT_EQ(std::norm(spec(t, k0)), peak);
}

TEST(Stft, RoundTripReconstructs) {
  const StftConfig cfg;
  for (std::size_t len : {1u, 100u, 511u, 512u, 1000u, 16000u, 32000u}) {
    const auto x = gaussian_waveform(len, len);
    const auto y = istft(stft(x, cfg), cfg, len, 16000);
    EXPECT_LT(relative_l2(y.samples(), x.samples()), 1e-6) << len;
  }
}

TEST(Stft, RoundTripOtherTapers) {
  for (auto cfg : {StftConfig{512, 128, WindowKind::Hann}, StftConfig{256, 128, WindowKind::Rectangular},
                   StftConfig{400, 100, WindowKind::SqrtHann}}) {
    const auto x = gaussian_waveform(5000, 9);
    const auto y = istft(stft(x, cfg), cfg, x.size(), 16000);
    EXPECT_LT(relative_l2(y.samples(), x.samples()), 1e-6);
  }
}

TEST(Stft, Linearity) {
  const StftConfig cfg;
  const auto x = gaussian_waveform(3000, 1), y = gaussian_waveform(3000, 2);
  const double a = 0.7, b = -1.3;
  const auto sx = stft(x, cfg), sy = stft(y, cfg);
  const auto sz = stft(x.scaled(a) + y.scaled(b), cfg);
  for (std::size_t t = 0; t < sz.frames(); ++t) {
    for (std::size_t f = 0; f < sz.bins(); ++f) {
      EXPECT_LT(std::abs(sz(t, f) - (a * sx(t, f) + b * sy(t, f))), 1e-10);
    }
  }
}

TEST(Stft, SingleRectangularFrameParseval) {
  const StftConfig cfg{64, 64, WindowKind::Rectangular};
  const auto x = gaussian_vector(64, 5);
  const auto spec = stft(Waveform(x, 16000), cfg);
  ASSERT_EQ(spec.frames(), 1u);
  const auto ref = direct_dft(x);
  double e_time = 0.0, e_ref = 0.0, e_spec = 0.0;
  for (double v : x) e_time += v * v;
  for (const auto& v : ref) e_ref += std::norm(v);
  // full spectrum from the one-sided half
  for (std::size_t f = 0; f < spec.bins(); ++f) {
    const double weight = (f == 0 || f == 32) ? 1.0 : 2.0;
    e_spec += weight * std::norm(spec(0, f));
  }
  EXPECT_NEAR(e_spec / 64.0, e_time, 1e-8 * e_time);
  EXPECT_NEAR(e_spec, e_ref, 1e-8 * e_ref);
}

TEST(Stft, DimensionChecks) {
  const StftConfig cfg;
  const auto spec = stft(gaussian_waveform(2000, 3), cfg);
  EXPECT_THROW(istft(spec, StftConfig{256, 128, WindowKind::SqrtHann}, 2000, 16000),
               DimensionError);
  EXPECT_THROW(istft(spec, cfg, 20000, 16000), DimensionError);
}

TEST(Stft, MultichannelRoundTrip) {
  const StftConfig cfg;
  const MultichannelWaveform m({gaussian_waveform(4000, 1), gaussian_waveform(4000, 2)},
                               {"L1", "R1"});
  const auto spec = stft(m, cfg);
  EXPECT_EQ(spec.num_channels(), 2u);
  const auto back = istft(spec, cfg, 4000);
  EXPECT_EQ(back.layout().size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_LT(relative_l2(back.channel(c).samples(), m.channel(c).samples()), 1e-6);
  }
}
