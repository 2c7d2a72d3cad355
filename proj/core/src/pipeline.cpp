#include "phoneval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "phoneval/digest.hpp"
#include "phoneval/error.hpp"
#include "phoneval/log.hpp"
#include "phoneval/random.hpp"
#include "phoneval/wav.hpp"

#ifndef PHONEVAL_VERSION
#define PHONEVAL_VERSION "0.0.0"
#endif

namespace phoneval {
namespace fs = std::filesystem;

std::string_view version() { return PHONEVAL_VERSION; }

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    auto item = trim(std::string_view(value).substr(pos, comma - pos));
    if (!item.empty()) items.push_back(std::move(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

template <typename T>
std::vector<T> dedupe(std::vector<T> values, const std::string& key) {
  std::vector<T> out;
  for (const auto& v : values) {
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      logger()->warn("config key '{}': dropping duplicate entry", key);
      continue;
    }
    out.push_back(v);
  }
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& value, F&& convert) {
  const auto items = split_list(value);
  if (items.empty()) throw ConfigError("config key '" + key + "' must not be empty");
  std::vector<T> out;
  for (const auto& item : items) {
    try {
      out.push_back(convert(item));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  return dedupe(std::move(out), key);
}

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::string relative_string(const fs::path& path, const fs::path& base) {
  return fs::proximate(path, base).generic_string();
}

const std::set<std::string, std::less<>>& known_keys() {
  static const std::set<std::string, std::less<>> keys = {
      "speech_dir",          "alignment_dir",         "rir_root",
      "noise_kinds",         "speech_shaped.donor",   "recorded.path",
      "snr_list",            "angle_list",            "speech_angle",
      "algorithms",          "ears",                  "stft.window_length",
      "stft.hop_length",     "stft.window",           "detector.frame_length",
      "detector.threshold_db", "beamform.gevd_rank",  "beamform.loading",
      "metrics.filter_length", "phoneme.min_duration_s", "category_map",
      "output_dir",          "master_seed",           "workers"};
  return keys;
}

std::string scene_tag(const SceneKey& key) {
  return key.utterance_id + "|" + std::string(to_string(key.noise)) + "|" +
         format_fixed(key.snr_db, 4) + "|" + std::to_string(key.angle_deg);
}

}  // namespace

EnhanceOptions RunConfig::enhance_options() const {
  EnhanceOptions opts;
  opts.stft = stft;
  opts.gevd_rank = gevd_rank;
  opts.loading = loading;
  return opts;
}

std::vector<int> RunConfig::required_angles() const {
  std::vector<int> angles = angle_list;
  if (std::find(angles.begin(), angles.end(), speech_angle_deg) == angles.end()) {
    angles.push_back(speech_angle_deg);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

RunConfig parse_run_config(std::istream& in, const fs::path& base_dir, std::string_view source) {
  std::map<std::string, std::string, std::less<>> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    auto key = trim(std::string_view(content).substr(0, eq));
    auto value = trim(std::string_view(content).substr(eq + 1));
    if (!known_keys().contains(key)) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    if (!values.emplace(key, value).second) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
  }

  const auto take = [&](std::string_view key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
  const auto require = [&](std::string_view key) {
    auto v = take(key);
    if (!v || v->empty()) {
      throw ConfigError(std::string(source) + ": missing required key '" + std::string(key) + "'");
    }
    return *v;
  };

  RunConfig cfg;
  cfg.base_dir = fs::absolute(base_dir).lexically_normal();
  cfg.speech_dir = resolve(cfg.base_dir, require("speech_dir"));
  cfg.rir_root = resolve(cfg.base_dir, require("rir_root"));
  cfg.output_dir = resolve(cfg.base_dir, require("output_dir"));
  if (auto v = take("alignment_dir"); v && !v->empty()) {
    cfg.alignment_dir = resolve(cfg.base_dir, *v);
  }
  if (auto v = take("category_map"); v && !v->empty()) {
    cfg.category_map = resolve(cfg.base_dir, *v);
  }

  const auto kinds = parse_list<NoiseKind>("noise_kinds", require("noise_kinds"),
                                           [](const std::string& s) { return parse_noise_kind(s); });
  for (auto kind : kinds) {
    NoiseSource src{kind, std::nullopt};
    if (kind == NoiseKind::SpeechShaped) {
      src.path = resolve(cfg.base_dir, require("speech_shaped.donor"));
    } else if (kind == NoiseKind::Recorded) {
      src.path = resolve(cfg.base_dir, require("recorded.path"));
    }
    cfg.noises.push_back(std::move(src));
  }

  if (auto v = take("snr_list")) {
    cfg.snr_list = parse_list<double>("snr_list", *v, [](const std::string& s) {
      return parse_number<double>("snr_list", s);
    });
  }
  if (auto v = take("angle_list")) {
    cfg.angle_list = parse_list<int>("angle_list", *v, [](const std::string& s) {
      return parse_number<int>("angle_list", s);
    });
  }
  if (auto v = take("speech_angle")) cfg.speech_angle_deg = parse_number<int>("speech_angle", *v);
  if (auto v = take("algorithms")) {
    cfg.algorithms = parse_list<Algorithm>(
        "algorithms", *v, [](const std::string& s) { return parse_algorithm(s); });
  }
  if (auto v = take("ears")) {
    cfg.ears = parse_list<Ear>("ears", *v, [](const std::string& s) { return parse_ear(s); });
  }
  if (auto v = take("stft.window_length")) {
    cfg.stft.window_length = parse_number<std::size_t>("stft.window_length", *v);
  }
  if (auto v = take("stft.hop_length")) {
    cfg.stft.hop_length = parse_number<std::size_t>("stft.hop_length", *v);
  }
  if (auto v = take("stft.window")) {
    try {
      cfg.stft.window = parse_window_kind(*v);
    } catch (const Error& e) {
      throw ConfigError(std::string("config key 'stft.window': ") + e.what());
    }
  }
  if (auto v = take("detector.frame_length")) {
    cfg.detector.frame_length = parse_number<std::size_t>("detector.frame_length", *v);
  }
  if (auto v = take("detector.threshold_db")) {
    cfg.detector.threshold_db = parse_number<double>("detector.threshold_db", *v);
  }
  if (auto v = take("beamform.gevd_rank")) {
    cfg.gevd_rank = parse_number<std::size_t>("beamform.gevd_rank", *v);
  }
  if (auto v = take("beamform.loading")) {
    cfg.loading.relative = parse_number<double>("beamform.loading", *v);
  }
  if (auto v = take("metrics.filter_length")) {
    cfg.filter_length = parse_number<std::size_t>("metrics.filter_length", *v);
  }
  if (auto v = take("phoneme.min_duration_s")) {
    cfg.min_segment_s = parse_number<double>("phoneme.min_duration_s", *v);
  }
  if (auto v = take("master_seed")) cfg.master_seed = parse_number<std::uint64_t>("master_seed", *v);
  if (auto v = take("workers")) cfg.workers = parse_number<std::size_t>("workers", *v);

  try {
    cfg.stft.validate();
    cfg.detector.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.gevd_rank == 0 || cfg.gevd_rank > kBinauralLayout.size()) {
    throw ConfigError("beamform.gevd_rank must lie in [1, " +
                      std::to_string(kBinauralLayout.size()) + "]");
  }
  if (!(cfg.loading.relative >= 0.0)) throw ConfigError("beamform.loading must be >= 0");
  if (cfg.filter_length == 0) throw ConfigError("metrics.filter_length must be positive");
  if (!(cfg.min_segment_s >= 0.0)) throw ConfigError("phoneme.min_duration_s must be >= 0");
  if (cfg.workers == 0) throw ConfigError("workers must be positive");
  return cfg;
}

void check_config_paths(const RunConfig& cfg) {
  const auto need_dir = [](const fs::path& p, std::string_view what) {
    if (!fs::is_directory(p)) {
      throw ConfigError(std::string(what) + " does not exist: " + p.string());
    }
  };
  const auto need_file = [](const fs::path& p, std::string_view what) {
    if (!fs::is_regular_file(p)) {
      throw ConfigError(std::string(what) + " does not exist: " + p.string());
    }
  };
  need_dir(cfg.speech_dir, "speech_dir");
  if (cfg.alignment_dir) need_dir(*cfg.alignment_dir, "alignment_dir");
  need_dir(cfg.rir_root, "rir_root");
  if (cfg.category_map) need_file(*cfg.category_map, "category_map");
  for (const auto& n : cfg.noises) {
    if (n.path) need_file(*n.path, std::string(to_string(n.kind)) + " noise source");
  }
  for (int angle : cfg.required_angles()) {
    const auto dir = cfg.rir_root / std::to_string(angle);
    if (!fs::is_directory(dir)) {
      throw ConfigError("angle " + std::to_string(angle) + " has no RIRs under " +
                        cfg.rir_root.string());
    }
    for (const auto& ch : kBinauralLayout) {
      if (!fs::is_regular_file(dir / (ch + ".wav"))) {
        throw ConfigError("angle " + std::to_string(angle) + " is missing channel " + ch +
                          " under " + cfg.rir_root.string());
      }
    }
  }
  if (discover_utterances(cfg).empty()) {
    throw ConfigError("speech_dir contains no .wav files: " + cfg.speech_dir.string());
  }
}

RunConfig validate_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  auto cfg = parse_run_config(in, path.parent_path(), path.string());
  check_config_paths(cfg);
  return cfg;
}

std::vector<Utterance> discover_utterances(const RunConfig& cfg) {
  std::vector<Utterance> out;
  if (!fs::is_directory(cfg.speech_dir)) return out;
  for (const auto& entry : fs::directory_iterator(cfg.speech_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    Utterance u{entry.path().stem().string(), entry.path(), std::nullopt};
    if (cfg.alignment_dir) {
      const auto a = *cfg.alignment_dir / (u.id + ".csv");
      if (fs::is_regular_file(a)) u.alignment_path = a;
    }
    out.push_back(std::move(u));
  }
  std::sort(out.begin(), out.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  return out;
}

std::uint64_t scene_seed(std::uint64_t master_seed, const SceneKey& key) {
  return derive_seed(master_seed, scene_tag(key));
}

namespace {

struct PreparedUtterance {
  Utterance utterance;
  std::vector<PhonemeSegment> segments;
  std::vector<std::string> categories;
};

struct SceneJob {
  const PreparedUtterance* utterance = nullptr;
  SceneKey key;
  std::optional<fs::path> noise_path;
  std::uint64_t seed = 0;
};

std::vector<EvalRecord> evaluate_scene(const SceneJob& job, const RunConfig& cfg,
                                       const RirSet& rirs) {
  SceneConfig sc;
  sc.speech_path = job.utterance->utterance.speech_path;
  sc.noise.kind = job.key.noise;
  sc.noise.source_path = job.noise_path;
  sc.geometry.speech_angle_deg = cfg.speech_angle_deg;
  sc.geometry.noise_angle_deg = job.key.angle_deg;
  sc.geometry.target_snr_db = job.key.snr_db;
  sc.geometry.detector = cfg.detector;
  sc.rir_set = &rirs;
  sc.seed = job.seed;
  const Scene scene = build_scene(sc);
  const int sr = scene.sample_rate();
  const auto& segments = job.utterance->segments;

  EvalRecord base;
  base.utterance_id = job.key.utterance_id;
  base.noise_kind = std::string(to_string(job.key.noise));
  base.noise_angle_deg = job.key.angle_deg;
  base.target_snr_db = job.key.snr_db;
  base.segment_duration_s = static_cast<double>(scene.dry_length) / sr;

  std::vector<EvalRecord> out;
  std::vector<BssProjector> projectors;
  std::vector<double> utterance_sir_in;
  std::vector<std::vector<double>> segment_sir_in;
  for (Ear ear : cfg.ears) {
    const auto& ref = reference_channel(ear);
    projectors.emplace_back(scene.speech_image.channel(ref), scene.noise_image.channel(ref),
                            cfg.filter_length);
    const auto dec = projectors.back().decompose(scene.mixture.channel(ref));
    const auto m = metrics_from_decomposition(dec);
    utterance_sir_in.push_back(m.sir_db);
    EvalRecord r = base;
    r.ear = ear;
    r.algorithm = std::string(kInputAlgorithm);
    r.sir_in_db = m.sir_db;
    r.sdr_out_db = m.sdr_db;
    r.sir_out_db = m.sir_db;
    r.sar_out_db = m.sar_db;
    out.push_back(std::move(r));
    std::vector<double> seg_in;
    for (const auto& s : score_segments(dec, segments, sr, cfg.min_segment_s).scored) {
      seg_in.push_back(s.metrics.sir_db);
    }
    segment_sir_in.push_back(std::move(seg_in));
  }

  const auto opts = cfg.enhance_options();
  for (Algorithm alg : cfg.algorithms) {
    for (std::size_t e = 0; e < cfg.ears.size(); ++e) {
      const Ear ear = cfg.ears[e];
      const auto estimate = enhance_ear(scene, ear, alg, opts);
      const auto dec = projectors[e].decompose(estimate);
      const auto m = metrics_from_decomposition(dec);
      EvalRecord r = base;
      r.ear = ear;
      r.algorithm = std::string(to_string(alg));
      r.sir_in_db = utterance_sir_in[e];
      r.sdr_out_db = m.sdr_db;
      r.sir_out_db = m.sir_db;
      r.sar_out_db = m.sar_db;
      out.push_back(r);

      const auto scored = score_segments(dec, segments, sr, cfg.min_segment_s).scored;
      std::size_t k = 0;
      for (std::size_t i = 0; i < segments.size(); ++i) {
        if (k >= scored.size() || !(scored[k].segment == segments[i])) continue;
        EvalRecord p = r;
        p.scope = Scope::Phoneme;
        p.phoneme = segments[i].label;
        p.category = job.utterance->categories[i];
        p.sir_in_db = segment_sir_in[e][k];
        p.sdr_out_db = scored[k].metrics.sdr_db;
        p.sir_out_db = scored[k].metrics.sir_db;
        p.sar_out_db = scored[k].metrics.sar_db;
        p.segment_duration_s = segments[i].duration();
        p.segment_start_s = segments[i].start;
        out.push_back(std::move(p));
        ++k;
      }
    }
  }
  return out;
}

}  // namespace

RunResult run_matrix(const RunConfig& cfg) {
  RunResult result;
  auto& manifest = result.manifest;
  manifest.version = std::string(version());

  const auto categories = cfg.category_map ? PhonemeCategoryMap::load(*cfg.category_map)
                                           : default_category_map();
  const auto angles = cfg.required_angles();
  const auto rirs = RirSet::load(cfg.rir_root, angles);

  const auto digest = [&](const fs::path& p) {
    manifest.input_digests[relative_string(p, cfg.base_dir)] = to_hex(sha256_file(p));
  };
  for (int angle : angles) {
    for (const auto& ch : kBinauralLayout) {
      digest(cfg.rir_root / std::to_string(angle) / (ch + ".wav"));
    }
  }
  for (const auto& n : cfg.noises) {
    if (n.path) digest(*n.path);
  }
  if (cfg.category_map) digest(*cfg.category_map);

  std::vector<PreparedUtterance> utterances;
  bool any_alignment = false;
  for (auto& u : discover_utterances(cfg)) {
    digest(u.speech_path);
    PreparedUtterance prepared{u, {}, {}};
    if (u.alignment_path) {
      digest(*u.alignment_path);
      auto alignment = parse_alignment(*u.alignment_path);
      any_alignment = true;
      manifest.coverage.total_rows += alignment.total_rows;
      manifest.coverage.silence_rows += alignment.silence_rows;
      const int sr = read_wav_mono(u.speech_path).sample_rate();
      for (const auto& seg : alignment.segments) {
        const auto [b, e] = segment_bounds(seg, sr);
        if (seg.duration() < cfg.min_segment_s || e <= b) {
          ++manifest.coverage.short_rows;
        } else {
          ++manifest.coverage.scored_rows;
        }
        ++manifest.phoneme_counts[seg.label];
        auto category = categories.categorize(seg.label);
        manifest.phoneme_categories[seg.label] = category;
        prepared.categories.push_back(std::move(category));
      }
      prepared.segments = std::move(alignment.segments);
    } else if (cfg.alignment_dir) {
      logger()->warn("utterance '{}' has no alignment; scoring the utterance level only", u.id);
    }
    utterances.push_back(std::move(prepared));
  }
  if (utterances.empty()) throw ConfigError("no utterances found in " + cfg.speech_dir.string());
  if (!any_alignment) logger()->warn("no phoneme alignments found; report is utterance-level only");

  std::vector<SceneJob> jobs;
  for (const auto& u : utterances) {
    for (const auto& n : cfg.noises) {
      for (double snr : cfg.snr_list) {
        for (int angle : cfg.angle_list) {
          SceneJob job{&u, SceneKey{u.utterance.id, n.kind, snr, angle}, n.path, 0};
          job.seed = scene_seed(cfg.master_seed, job.key);
          manifest.scenes.push_back(SceneSeed{job.key, job.seed});
          jobs.push_back(std::move(job));
        }
      }
    }
  }

  std::vector<std::vector<EvalRecord>> outputs(jobs.size());
  std::vector<std::optional<std::string>> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        outputs[i] = evaluate_scene(jobs[i], cfg, rirs);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        logger()->error("scene {} failed: {}", scene_tag(jobs[i].key), e.what());
      }
    }
  };
  const std::size_t threads = std::min(cfg.workers, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) {
      manifest.failures.push_back(SceneFailure{jobs[i].key, *errors[i]});
      continue;
    }
    for (auto& r : outputs[i]) result.records.push_back(std::move(r));
  }
  sort_records(result.records);
  manifest.record_count = result.records.size();

  auto& c = manifest.config;
  const auto join = [](const auto& items, auto&& fmt) {
    std::string s;
    for (const auto& it : items) s += (s.empty() ? "" : ",") + fmt(it);
    return s;
  };
  c["speech_dir"] = relative_string(cfg.speech_dir, cfg.base_dir);
  c["alignment_dir"] = cfg.alignment_dir ? relative_string(*cfg.alignment_dir, cfg.base_dir) : "";
  c["rir_root"] = relative_string(cfg.rir_root, cfg.base_dir);
  c["noise_kinds"] =
      join(cfg.noises, [](const NoiseSource& n) { return std::string(to_string(n.kind)); });
  for (const auto& n : cfg.noises) {
    if (n.kind == NoiseKind::SpeechShaped) {
      c["speech_shaped.donor"] = relative_string(*n.path, cfg.base_dir);
    }
    if (n.kind == NoiseKind::Recorded) c["recorded.path"] = relative_string(*n.path, cfg.base_dir);
  }
  c["snr_list"] = join(cfg.snr_list, [](double v) { return format_key(v); });
  c["angle_list"] = join(cfg.angle_list, [](int v) { return std::to_string(v); });
  c["speech_angle"] = std::to_string(cfg.speech_angle_deg);
  c["algorithms"] = join(cfg.algorithms, [](Algorithm a) { return std::string(to_string(a)); });
  c["ears"] = join(cfg.ears, [](Ear e) { return std::string(to_string(e)); });
  c["stft.window_length"] = std::to_string(cfg.stft.window_length);
  c["stft.hop_length"] = std::to_string(cfg.stft.hop_length);
  c["stft.window"] = std::string(to_string(cfg.stft.window));
  c["detector.frame_length"] = std::to_string(cfg.detector.frame_length);
  c["detector.threshold_db"] = format_key(cfg.detector.threshold_db);
  c["beamform.gevd_rank"] = std::to_string(cfg.gevd_rank);
  {
    std::ostringstream os;
    os.precision(17);
    os << cfg.loading.relative;
    c["beamform.loading"] = os.str();
  }
  c["metrics.filter_length"] = std::to_string(cfg.filter_length);
  c["phoneme.min_duration_s"] = format_fixed(cfg.min_segment_s, 6);
  c["category_map"] = cfg.category_map ? relative_string(*cfg.category_map, cfg.base_dir)
                                       : std::string("<bundled>");
  c["master_seed"] = std::to_string(cfg.master_seed);
  return result;
}

std::string manifest_json(const RunManifest& m) {
  using nlohmann::ordered_json;
  const auto key_json = [](const SceneKey& k) {
    ordered_json j;
    j["utterance_id"] = k.utterance_id;
    j["noise_kind"] = std::string(to_string(k.noise));
    j["target_snr_db"] = k.snr_db;
    j["noise_angle_deg"] = k.angle_deg;
    return j;
  };
  ordered_json j;
  j["toolkit_version"] = m.version;
  j["config"] = m.config;
  j["input_digests"] = m.input_digests;
  auto scenes = ordered_json::array();
  for (const auto& s : m.scenes) {
    auto e = key_json(s.key);
    e["seed"] = std::to_string(s.seed);
    scenes.push_back(std::move(e));
  }
  j["scenes"] = std::move(scenes);
  auto failures = ordered_json::array();
  for (const auto& f : m.failures) {
    auto e = key_json(f.key);
    e["error"] = f.message;
    failures.push_back(std::move(e));
  }
  j["failures"] = std::move(failures);
  j["alignment_coverage"] = {{"total_rows", m.coverage.total_rows},
                             {"silence_rows", m.coverage.silence_rows},
                             {"short_rows", m.coverage.short_rows},
                             {"scored_rows", m.coverage.scored_rows}};
  j["record_count"] = m.record_count;
  return j.dump(2) + "\n";
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string summary_text(const std::vector<EvalRecord>& records,
                         const std::function<bool(const EvalRecord&)>& keep,
                         std::vector<RecordField> group_by) {
  std::vector<EvalRecord> selected;
  for (const auto& r : records) {
    if (keep(r)) selected.push_back(r);
  }
  std::vector<SummaryRow> rows;
  if (!selected.empty()) rows = aggregate(selected, group_by);
  std::ostringstream os;
  write_summary_csv(os, group_by, rows);
  return os.str();
}

}  // namespace

void emit_report(const std::vector<EvalRecord>& records, const RunManifest& manifest,
                 const fs::path& output_dir) {
  if (records.empty()) throw InvalidArgument("emit_report: no records");
  std::error_code ec;
  fs::create_directories(output_dir / "figure_data", ec);
  if (ec) throw IoError("cannot create " + output_dir.string() + ": " + ec.message());

  using F = RecordField;
  const auto is_utt = [](const EvalRecord& r) { return r.scope == Scope::Utterance; };
  const auto is_phone = [](const EvalRecord& r) { return r.scope == Scope::Phoneme; };
  const auto processed = [](const EvalRecord& r) { return r.algorithm != kInputAlgorithm; };
  const auto left = [](const EvalRecord& r) { return r.ear == Ear::Left; };

  if (std::none_of(records.begin(), records.end(), is_phone)) {
    logger()->warn("no phoneme-level records; report covers the utterance level only");
  }

  {
    std::ostringstream os;
    write_records_csv(os, records);
    write_file(output_dir / "records.csv", os.str());
  }
  write_file(output_dir / "summary.csv",
             summary_text(records, [](const EvalRecord&) { return true; },
                          {F::Scope, F::Category, F::Algorithm, F::NoiseKind, F::TargetSnr,
                           F::Ear}));
  write_file(output_dir / "manifest.json", manifest_json(manifest));

  const auto fig = output_dir / "figure_data";
  write_file(fig / "utterance_by_ear.csv",
             summary_text(records, [&](const EvalRecord& r) { return is_utt(r) && processed(r); },
                          {F::Ear}));
  write_file(fig / "utterance_by_noise_kind.csv",
             summary_text(records,
                          [&](const EvalRecord& r) { return is_utt(r) && processed(r) && left(r); },
                          {F::NoiseKind}));
  write_file(fig / "utterance_by_angle.csv",
             summary_text(records,
                          [&](const EvalRecord& r) { return is_utt(r) && processed(r) && left(r); },
                          {F::NoiseAngle}));
  write_file(fig / "utterance_by_snr.csv",
             summary_text(records,
                          [&](const EvalRecord& r) { return is_utt(r) && processed(r) && left(r); },
                          {F::TargetSnr}));
  const auto at_0db = [&](const EvalRecord& r) {
    return processed(r) && left(r) && r.target_snr_db == 0.0;
  };
  write_file(fig / "phoneme_by_category.csv", summary_text(records, at_0db, {F::Scope, F::Category}));
  write_file(fig / "phoneme_by_noise_category.csv",
             summary_text(records, [&](const EvalRecord& r) { return is_phone(r) && at_0db(r); },
                          {F::NoiseKind, F::Category}));
  write_file(fig / "phoneme_by_algorithm_noise_category.csv",
             summary_text(records, [&](const EvalRecord& r) { return is_phone(r) && at_0db(r); },
                          {F::Algorithm, F::NoiseKind, F::Category}));
  write_file(fig / "phoneme_by_algorithm_snr_category.csv",
             summary_text(records,
                          [&](const EvalRecord& r) {
                            return is_phone(r) && processed(r) && left(r) &&
                                   r.noise_kind == to_string(NoiseKind::SpeechShaped);
                          },
                          {F::Algorithm, F::TargetSnr, F::Category}));

  std::ostringstream phon;
  phon << "phoneme,category,count\n";
  std::map<std::string, std::size_t> per_category;
  for (const auto& [label, count] : manifest.phoneme_counts) {
    const auto it = manifest.phoneme_categories.find(label);
    const auto category = it == manifest.phoneme_categories.end() ? std::string(kOtherCategory)
                                                                  : it->second;
    phon << label << ',' << category << ',' << count << '\n';
    per_category[category] += count;
  }
  write_file(fig / "phoneme_counts.csv", phon.str());
  std::ostringstream cat;
  cat << "category,count\n";
  for (const auto& [category, count] : per_category) cat << category << ',' << count << '\n';
  write_file(fig / "category_counts.csv", cat.str());
}

}  // namespace phoneval
