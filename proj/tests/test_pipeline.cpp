#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "phoneval/error.hpp"
#include "phoneval/pipeline.hpp"
#include "support.hpp"

using namespace phoneval;
using namespace phoneval::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kDesk = fs::path(PHONEVAL_DATA_DIR) / "desk";

RunConfig parse_text(const std::string& text, const fs::path& base = "/base") {
  std::istringstream in(text);
  return parse_run_config(in, base, "test.conf");
}

std::string config_error_of(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const std::string kMinimal =
    "speech_dir = speech\nrir_root = rirs\nnoise_kinds = white\noutput_dir = out\n";

// Two desk utterances, the desk RIRs and donor, in a scratch directory.
struct MiniCorpus {
  TempDir dir{"pipeline"};

  MiniCorpus() {
    const auto& root = dir.path();
    fs::create_directories(root / "speech");
    fs::create_directories(root / "alignments");
    for (const char* id : {"desk01", "desk02"}) {
      fs::copy_file(kDesk / "speech" / (std::string(id) + ".wav"), root / "speech" / (std::string(id) + ".wav"));
      fs::copy_file(kDesk / "alignments" / (std::string(id) + ".csv"),
                    root / "alignments" / (std::string(id) + ".csv"));
    }
    fs::copy(kDesk / "rirs", root / "rirs", fs::copy_options::recursive);
    fs::copy_file(kDesk / "donor.wav", root / "donor.wav");
  }

  // Keys set in `extra` replace the defaults below.
  fs::path write_config(const std::string& extra, bool aligned = true) const {
    std::vector<std::string> lines = {"speech_dir = speech",
                                      "rir_root = rirs",
                                      "noise_kinds = white, speech_shaped",
                                      "speech_shaped.donor = donor.wav",
                                      "snr_list = -5, 0, 5",
                                      "angle_list = 45",
                                      "output_dir = out"};
    if (aligned) lines.push_back("alignment_dir = alignments");
    std::ostringstream text;
    for (const auto& line : lines) {
      const auto key = line.substr(0, line.find(' '));
      if (extra.find(key + " =") == std::string::npos) text << line << '\n';
    }
    text << extra;
    const auto path = dir.path() / "run.conf";
    std::ofstream(path) << text.str();
    return path;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(RunConfig, DefaultsAndRelativePaths) {
  const auto cfg = parse_text(kMinimal);
  EXPECT_EQ(cfg.snr_list, (std::vector<double>{-5.0, 0.0, 5.0}));
  EXPECT_EQ(cfg.angle_list, (std::vector<int>{45, 90}));
  EXPECT_EQ(cfg.algorithms.size(), 3u);
  EXPECT_EQ(cfg.ears.size(), 2u);
  EXPECT_EQ(cfg.stft.window_length, 512u);
  EXPECT_EQ(cfg.stft.hop_length, 256u);
  EXPECT_EQ(cfg.filter_length, 512u);
  EXPECT_DOUBLE_EQ(cfg.min_segment_s, 0.032);
  EXPECT_EQ(cfg.speech_dir, fs::path("/base/speech"));
  EXPECT_FALSE(cfg.alignment_dir.has_value());
  EXPECT_EQ(cfg.required_angles(), (std::vector<int>{0, 45, 90}));
}

TEST(RunConfig, OverridesAndDedupe) {
  const auto cfg = parse_text(kMinimal +
                              "snr_list = 0, -5, 0\n"
                              "angle_list = 90\n"
                              "algorithms = mwf\n"
                              "ears = R\n"
                              "# a comment\n"
                              "stft.window_length = 256   # trailing comment\n"
                              "stft.hop_length = 128\n"
                              "master_seed = 99\n");
  EXPECT_EQ(cfg.snr_list, (std::vector<double>{0.0, -5.0}));
  EXPECT_EQ(cfg.angle_list, (std::vector<int>{90}));
  EXPECT_EQ(cfg.algorithms, (std::vector<Algorithm>{Algorithm::Mwf}));
  EXPECT_EQ(cfg.ears, (std::vector<Ear>{Ear::Right}));
  EXPECT_EQ(cfg.stft.window_length, 256u);
  EXPECT_EQ(cfg.master_seed, 99u);
}

TEST(RunConfig, Rejections) {
  EXPECT_NE(config_error_of(kMinimal + "colour = red\n").find("colour"), std::string::npos);
  EXPECT_FALSE(config_error_of(kMinimal + "snr_list =\n").empty());
  EXPECT_FALSE(config_error_of(kMinimal + "snr_list = 0\nsnr_list = 5\n").empty());
  EXPECT_NE(config_error_of("rir_root = r\nnoise_kinds = white\noutput_dir = o\n").find("speech_dir"),
            std::string::npos);
  EXPECT_FALSE(config_error_of(kMinimal + "noise_kinds = speech_shaped\n").empty());
  EXPECT_FALSE(config_error_of(kMinimal + "beamform.gevd_rank = 5\n").empty());
  EXPECT_FALSE(config_error_of(kMinimal + "stft.hop_length = 1024\n").empty());
  EXPECT_FALSE(config_error_of(kMinimal + "algorithms = das\n").empty());
  EXPECT_FALSE(config_error_of(kMinimal + "workers = 0\n").empty());
  EXPECT_FALSE(config_error_of(kMinimal + "just some words\n").empty());
}

TEST(RunConfig, MissingAngleIsNamed) {
  MiniCorpus corpus;
  const auto path = corpus.write_config("angle_list = 45, 30\n");
  try {
    validate_config(path);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("angle 30"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, MissingPathIsNamed) {
  MiniCorpus corpus;
  fs::remove(corpus.dir.path() / "donor.wav");
  try {
    validate_config(corpus.write_config(""));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("donor.wav"), std::string::npos) << e.what();
  }
}

TEST(SceneSeeds, DependOnlyOnCoordinates) {
  const SceneKey a{"u1", NoiseKind::White, 0.0, 45};
  EXPECT_EQ(scene_seed(7, a), scene_seed(7, a));
  EXPECT_NE(scene_seed(7, a), scene_seed(8, a));
  EXPECT_NE(scene_seed(7, a), scene_seed(7, SceneKey{"u1", NoiseKind::White, 5.0, 45}));
  EXPECT_NE(scene_seed(7, a), scene_seed(7, SceneKey{"u1", NoiseKind::SpeechShaped, 0.0, 45}));
  EXPECT_NE(scene_seed(7, a), scene_seed(7, SceneKey{"u2", NoiseKind::White, 0.0, 45}));
}

TEST(RunMatrix, CardinalityAndCoverage) {
  MiniCorpus corpus;
  const auto cfg = validate_config(corpus.write_config("workers = 2\n"));
  const auto result = run_matrix(cfg);
  ASSERT_TRUE(result.complete());
  EXPECT_EQ(result.manifest.scenes.size(), 12u);
  std::size_t utterance = 0, input = 0, phoneme = 0;
  for (const auto& r : result.records) {
    r.validate();
    if (r.scope == Scope::Phoneme) {
      ++phoneme;
    } else if (r.algorithm == kInputAlgorithm) {
      ++input;
    } else {
      ++utterance;
    }
  }
  EXPECT_EQ(utterance, 72u);  // 2 utt x 2 noise x 3 snr x 1 angle x 3 alg x 2 ears
  EXPECT_EQ(input, 24u);
  const auto& cov = result.manifest.coverage;
  EXPECT_EQ(cov.silence_rows + cov.short_rows + cov.scored_rows, cov.total_rows);
  // every scored row appears in 6 scenes per utterance, for 3 algorithms and 2 ears
  EXPECT_EQ(phoneme, cov.scored_rows * 6 * 3 * 2);
  EXPECT_TRUE(std::is_sorted(result.records.begin(), result.records.end(), record_less));
  EXPECT_EQ(result.manifest.input_digests.size(), 2u * 2 + 1 + 8);
}

TEST(RunMatrix, ReportIsDeterministicAndSeeded) {
  MiniCorpus corpus;
  auto cfg = validate_config(corpus.write_config("ears = L\nalgorithms = mwf\nsnr_list = 0\n"));
  const auto out1 = corpus.dir.path() / "r1";
  const auto out2 = corpus.dir.path() / "r2";
  auto first = run_matrix(cfg);
  emit_report(first.records, first.manifest, out1);
  cfg.workers = 3;
  auto second = run_matrix(cfg);
  emit_report(second.records, second.manifest, out2);
  for (const char* name : {"records.csv", "summary.csv", "manifest.json",
                           "figure_data/phoneme_by_category.csv"}) {
    EXPECT_EQ(slurp(out1 / name), slurp(out2 / name)) << name;
  }
  const std::string text = slurp(out1 / "records.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), kRecordsHeader);

  cfg.master_seed = 12345;
  const auto reseeded = run_matrix(cfg);
  ASSERT_EQ(reseeded.records.size(), first.records.size());
  bool differs = false;
  for (std::size_t i = 0; i < first.records.size(); ++i) {
    differs |= reseeded.records[i].sir_out_db != first.records[i].sir_out_db;
  }
  EXPECT_TRUE(differs);
}

TEST(RunMatrix, WithoutAlignmentsOnlyUtteranceScope) {
  MiniCorpus corpus;
  const auto cfg = validate_config(
      corpus.write_config("noise_kinds = white\nsnr_list = 0\nalgorithms = mvdr\n", false));
  const auto result = run_matrix(cfg);
  ASSERT_EQ(result.records.size(), 2u * 2 * 2);
  for (const auto& r : result.records) EXPECT_EQ(r.scope, Scope::Utterance);
  TempDir out("report");
  emit_report(result.records, result.manifest, out.path());
  EXPECT_TRUE(fs::exists(out.path() / "summary.csv"));
}

TEST(RunMatrix, UnreadableSpeechFailsOnlyItsScenes) {
  MiniCorpus corpus;
  std::ofstream(corpus.dir.path() / "speech" / "broken.wav") << "not a wav";
  const auto cfg = validate_config(
      corpus.write_config("noise_kinds = white\nsnr_list = 0\nalgorithms = mvdr\nears = L\n"));
  const auto result = run_matrix(cfg);
  EXPECT_FALSE(result.complete());
  ASSERT_EQ(result.manifest.failures.size(), 1u);
  EXPECT_EQ(result.manifest.failures[0].key.utterance_id, "broken");
  EXPECT_EQ(result.records.size() - std::count_if(result.records.begin(), result.records.end(),
                                                  [](const EvalRecord& r) { return r.scope == Scope::Phoneme; }),
            4u);
}

TEST(Manifest, JsonCarriesSeedsAndVersion) {
  RunManifest m;
  m.version = std::string(version());
  m.scenes.push_back({SceneKey{"u1", NoiseKind::White, 0.0, 45}, 18446744073709551615ull});
  const auto json = manifest_json(m);
  EXPECT_NE(json.find("\"18446744073709551615\""), std::string::npos);
  EXPECT_NE(json.find(m.version), std::string::npos);
}
