#include <benchmark/benchmark.h>

#include "phoneval/phoneval.hpp"
#include "support.hpp"

using namespace phoneval;
using namespace phoneval::testing;

namespace {

Scene bench_scene(std::size_t length) {
  std::vector<RirTap> taps;
  const std::array<long, 4> noise_delay = {10, 11, 2, 3};
  for (std::size_t c = 0; c < 4; ++c) {
    taps.push_back({0, kBinauralLayout[c], 3, 1.0});
    taps.push_back({45, kBinauralLayout[c], noise_delay[c], c < 2 ? 0.5 : 1.0});
  }
  const auto rirs = synth_test_rirs(taps, DecayTail{});
  return mix_scene(gaussian_waveform(length, 1, 0.1), white_noise(length, 2), rirs, SceneGeometry{});
}

void BM_StftRoundTrip(benchmark::State& state) {
  const auto x = gaussian_waveform(static_cast<std::size_t>(state.range(0)), 3);
  const StftConfig cfg;
  for (auto _ : state) {
    auto y = istft(stft(x, cfg), cfg, x.size(), x.sample_rate());
    benchmark::DoNotOptimize(y);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StftRoundTrip)->Arg(16000)->Arg(48000);

void BM_SpeechShapedNoise(benchmark::State& state) {
  const auto donor = gaussian_waveform(static_cast<std::size_t>(state.range(0)), 4);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto n = speech_shaped_noise(donor, ++seed);
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_SpeechShapedNoise)->Arg(48000)->Arg(1 << 16);

void BM_BssProjectorSetup(benchmark::State& state) {
  const auto s = gaussian_waveform(32000, 5);
  const auto n = gaussian_waveform(32000, 6);
  for (auto _ : state) {
    BssProjector p(s, n, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_BssProjectorSetup)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BssDecompose(benchmark::State& state) {
  const auto s = gaussian_waveform(32000, 5);
  const auto n = gaussian_waveform(32000, 6);
  const auto y = gaussian_waveform(32000, 7);
  const BssProjector p(s, n, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto d = p.decompose(y);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_BssDecompose)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_EnhanceEar(benchmark::State& state) {
  const auto scene = bench_scene(32000);
  const auto algorithm = static_cast<Algorithm>(state.range(0));
  for (auto _ : state) {
    auto out = enhance_ear(scene, Ear::Left, algorithm);
    benchmark::DoNotOptimize(out);
  }
  state.SetLabel(std::string(to_string(algorithm)));
}
BENCHMARK(BM_EnhanceEar)
    ->Arg(static_cast<int>(Algorithm::Mvdr))
    ->Arg(static_cast<int>(Algorithm::Mwf))
    ->Arg(static_cast<int>(Algorithm::GevdMwf))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
