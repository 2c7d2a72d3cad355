#include "phoneval/phoneme.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "phoneval/error.hpp"
#include "phoneval/log.hpp"

namespace phoneval {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool parse_seconds(std::string_view text, double& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string strip_bom(std::string line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  return line;
}

[[noreturn]] void row_error(std::string_view source, std::size_t line_no, const std::string& what) {
  throw FormatError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

bool is_silence_label(std::string_view label) {
  return label.empty() || label == "sil" || label == "sp" || label == "spn" || label == "<eps>";
}

Alignment parse_alignment(std::istream& in, std::string_view source) {
  Alignment out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  double previous_end = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) line = strip_bom(std::move(line));
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "phoneme" || fields[1] != "start" ||
          fields[2] != "end") {
        row_error(source, line_no, "expected header 'phoneme,start,end'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) row_error(source, line_no, "expected 3 fields");
    ++out.total_rows;
    double start = 0.0, end = 0.0;
    if (!parse_seconds(fields[1], start) || !parse_seconds(fields[2], end)) {
      row_error(source, line_no, "malformed time value");
    }
    if (start < 0.0) row_error(source, line_no, "negative start time");
    if (!(end > start)) row_error(source, line_no, "end time not after start time");
    if (start < previous_end - 1e-9) {
      row_error(source, line_no, "segment overlaps or precedes the previous one");
    }
    previous_end = end;
    if (is_silence_label(fields[0])) {
      ++out.silence_rows;
      continue;
    }
    out.segments.push_back(PhonemeSegment{std::string(fields[0]), start, end});
  }
  if (!header_seen) throw FormatError(std::string(source) + ": empty alignment file");
  return out;
}

Alignment parse_alignment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open alignment " + path.string());
  return parse_alignment(in, path.string());
}

const std::vector<std::string>& standard_categories() {
  static const std::vector<std::string> categories = {
      "plosive", "fricative", "sibilant", "affricate",  "nasal",    "lateral", "approximant",
      "tap",     "close",     "near-close", "close-mid", "open-mid", "open"};
  return categories;
}

PhonemeCategoryMap::PhonemeCategoryMap(std::map<std::string, std::string, std::less<>> mapping)
    : mapping_(std::move(mapping)) {}

PhonemeCategoryMap PhonemeCategoryMap::parse(std::istream& in, std::string_view source) {
  std::map<std::string, std::string, std::less<>> mapping;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) line = strip_bom(std::move(line));
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = split_csv(content);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "phoneme" || fields[1] != "category") {
        row_error(source, line_no, "expected header 'phoneme,category'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      row_error(source, line_no, "expected 'phoneme,category'");
    }
    auto [it, inserted] = mapping.emplace(std::string(fields[0]), std::string(fields[1]));
    if (!inserted && it->second != fields[1]) {
      row_error(source, line_no,
                "phoneme '" + it->first + "' already mapped to '" + it->second + "'");
    }
  }
  if (!header_seen) throw FormatError(std::string(source) + ": empty category map");
  return PhonemeCategoryMap(std::move(mapping));
}

PhonemeCategoryMap PhonemeCategoryMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open category map " + path.string());
  return parse(in, path.string());
}

bool PhonemeCategoryMap::contains(std::string_view label) const {
  return mapping_.find(label) != mapping_.end();
}

std::string PhonemeCategoryMap::categorize(std::string_view label) const {
  if (auto it = mapping_.find(label); it != mapping_.end()) return it->second;
  static std::mutex warned_mutex;
  static std::set<std::string, std::less<>> warned;
  {
    std::lock_guard lock(warned_mutex);
    if (warned.insert(std::string(label)).second) {
      logger()->warn("phoneme '{}' has no category, counting it as '{}'", label, kOtherCategory);
    }
  }
  return std::string(kOtherCategory);
}

std::pair<std::size_t, std::size_t> segment_bounds(const PhonemeSegment& segment,
                                                   int sample_rate) {
  const auto to_sample = [&](double seconds) {
    return static_cast<std::size_t>(std::floor(seconds * sample_rate + 0.5));
  };
  return {to_sample(segment.start), to_sample(segment.end)};
}

SegmentScores score_segments(const Decomposition& decomposition,
                             const std::vector<PhonemeSegment>& segments, int sample_rate,
                             double min_duration_s) {
  SegmentScores out;
  for (const auto& seg : segments) {
    const auto [begin, end] = segment_bounds(seg, sample_rate);
    if (end > decomposition.length()) {
      throw InvalidArgument("phoneme '" + seg.label + "' ends at sample " + std::to_string(end) +
                            " beyond signal length " + std::to_string(decomposition.length()));
    }
    if (seg.duration() < min_duration_s || end <= begin) {
      ++out.skipped_short;
      continue;
    }
    out.scored.push_back(ScoredSegment{seg, segment_metrics(decomposition, begin, end)});
  }
  return out;
}

}  // namespace phoneval
