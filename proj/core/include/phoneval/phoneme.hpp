#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phoneval/bss_eval.hpp"

namespace phoneval {

/// One aligned phone, times in seconds.
struct PhonemeSegment {
  std::string label;
  double start = 0.0;
  double end = 0.0;

  [[nodiscard]] double duration() const noexcept { return end - start; }
  friend bool operator==(const PhonemeSegment&, const PhonemeSegment&) = default;
};

/// Parsed alignment plus the row accounting needed for coverage checks.
struct Alignment {
  std::vector<PhonemeSegment> segments;
  std::size_t total_rows = 0;
  std::size_t silence_rows = 0;
};

/// True for labels that mark pauses rather than phones ("sil", "sp", "spn", empty).
bool is_silence_label(std::string_view label);

/// CSV with header `phoneme,start,end`. Silence rows are dropped; overlaps, inverted or
/// negative times and malformed rows raise FormatError naming the line.
Alignment parse_alignment(std::istream& in, std::string_view source = "<stream>");
Alignment parse_alignment(const std::filesystem::path& path);

inline constexpr std::string_view kOtherCategory = "other";

/// The thirteen articulatory / vowel-height groups used for aggregation.
const std::vector<std::string>& standard_categories();

/// phoneme label -> category. Unknown labels map to "other" with a warning (once per label).
class PhonemeCategoryMap {
 public:
  PhonemeCategoryMap() = default;
  explicit PhonemeCategoryMap(std::map<std::string, std::string, std::less<>> mapping);

  /// Two-column UTF-8 CSV `phoneme,category` (header required).
  static PhonemeCategoryMap load(const std::filesystem::path& path);
  static PhonemeCategoryMap parse(std::istream& in, std::string_view source = "<stream>");

  [[nodiscard]] std::string categorize(std::string_view label) const;
  [[nodiscard]] bool contains(std::string_view label) const;
  [[nodiscard]] std::size_t size() const noexcept { return mapping_.size(); }
  [[nodiscard]] const std::map<std::string, std::string, std::less<>>& mapping() const noexcept {
    return mapping_;
  }

 private:
  std::map<std::string, std::string, std::less<>> mapping_;
};

/// Sample range [round(start*sr), round(end*sr)) with round-half-up.
std::pair<std::size_t, std::size_t> segment_bounds(const PhonemeSegment& segment,
                                                   int sample_rate);

struct ScoredSegment {
  PhonemeSegment segment;
  MetricTriple metrics;
};

struct SegmentScores {
  std::vector<ScoredSegment> scored;
  std::size_t skipped_short = 0;
};

inline constexpr double kDefaultMinSegmentSeconds = 0.032;

/// Metrics of every segment lasting at least `min_duration_s`, restricted from the
/// full-utterance decomposition. Segments past the end of the signal raise InvalidArgument.
SegmentScores score_segments(const Decomposition& decomposition,
                             const std::vector<PhonemeSegment>& segments, int sample_rate,
                             double min_duration_s = kDefaultMinSegmentSeconds);

}  // namespace phoneval
