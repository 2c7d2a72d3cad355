#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phoneval/beamform.hpp"
#include "phoneval/bss_eval.hpp"
#include "phoneval/noise.hpp"
#include "phoneval/phoneme.hpp"
#include "phoneval/records.hpp"
#include "phoneval/scene.hpp"
#include "phoneval/stft.hpp"

namespace phoneval {

std::string_view version();

/// The category map shipped with the library (same content as data/category_map.csv).
PhonemeCategoryMap default_category_map();

struct NoiseSource {
  NoiseKind kind = NoiseKind::White;
  std::optional<std::filesystem::path> path;  // donor or recording
};

/// Resolved run configuration. Paths are absolute (relative ones are taken against the
/// directory holding the config file).
///
/// Config files are `key = value` lines; `#` starts a comment; lists are comma separated.
/// Required keys: speech_dir, rir_root, noise_kinds, output_dir, plus speech_shaped.donor /
/// recorded.path when those kinds are listed.
struct RunConfig {
  std::filesystem::path base_dir;
  std::filesystem::path speech_dir;
  std::optional<std::filesystem::path> alignment_dir;
  std::filesystem::path rir_root;
  std::vector<NoiseSource> noises;
  std::vector<double> snr_list{-5.0, 0.0, 5.0};
  std::vector<int> angle_list{45, 90};
  int speech_angle_deg = 0;
  std::vector<Algorithm> algorithms{Algorithm::Mvdr, Algorithm::Mwf, Algorithm::GevdMwf};
  std::vector<Ear> ears{Ear::Left, Ear::Right};
  StftConfig stft;
  ActivityDetectorConfig detector;
  std::size_t gevd_rank = 1;
  Loading loading;
  std::size_t filter_length = kDefaultFilterLength;
  double min_segment_s = kDefaultMinSegmentSeconds;
  std::optional<std::filesystem::path> category_map;
  std::filesystem::path output_dir;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;

  [[nodiscard]] EnhanceOptions enhance_options() const;
  /// Every angle that must exist under rir_root (noise angles and the speech angle).
  [[nodiscard]] std::vector<int> required_angles() const;
};

/// Parses and normalises without touching the filesystem. Throws ConfigError.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir,
                           std::string_view source = "<stream>");

/// Checks that every referenced path exists and every angle has a complete RIR set.
void check_config_paths(const RunConfig& config);

/// parse_run_config + check_config_paths on a file.
RunConfig validate_config(const std::filesystem::path& path);

struct Utterance {
  std::string id;
  std::filesystem::path speech_path;
  std::optional<std::filesystem::path> alignment_path;
};

/// Sorted *.wav files of speech_dir with their matching `<id>.csv` alignments.
std::vector<Utterance> discover_utterances(const RunConfig& config);

struct SceneKey {
  std::string utterance_id;
  NoiseKind noise = NoiseKind::White;
  double snr_db = 0.0;
  int angle_deg = 0;
};

/// Stable per-scene seed: depends only on the master seed and the scene coordinates.
std::uint64_t scene_seed(std::uint64_t master_seed, const SceneKey& key);

struct SceneSeed {
  SceneKey key;
  std::uint64_t seed = 0;
};

struct SceneFailure {
  SceneKey key;
  std::string message;
};

struct AlignmentCoverage {
  std::size_t total_rows = 0;
  std::size_t silence_rows = 0;
  std::size_t short_rows = 0;
  std::size_t scored_rows = 0;
};

struct RunManifest {
  std::string version;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> input_digests;  // path relative to base_dir -> sha256
  std::vector<SceneSeed> scenes;
  std::vector<SceneFailure> failures;
  AlignmentCoverage coverage;
  std::map<std::string, std::size_t> phoneme_counts;
  std::map<std::string, std::string> phoneme_categories;
  std::size_t record_count = 0;
};

struct RunResult {
  std::vector<EvalRecord> records;
  RunManifest manifest;

  [[nodiscard]] bool complete() const noexcept { return manifest.failures.empty(); }
};

/// Builds and scores every (utterance, noise, snr, angle) scene. Failing scenes are logged
/// and listed in the manifest; the rest of the matrix still runs.
RunResult run_matrix(const RunConfig& config);

std::string manifest_json(const RunManifest& manifest);

/// records.csv, summary.csv, manifest.json and figure_data/*.csv under output_dir.
void emit_report(const std::vector<EvalRecord>& records, const RunManifest& manifest,
                 const std::filesystem::path& output_dir);

}  // namespace phoneval
