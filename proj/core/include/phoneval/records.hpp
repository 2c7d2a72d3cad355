#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phoneval/beamform.hpp"

namespace phoneval {

enum class Scope { Utterance, Phoneme };

std::string_view to_string(Scope scope);
Scope parse_scope(std::string_view name);

/// Algorithm name used for rows that score the unprocessed mixture.
inline constexpr std::string_view kInputAlgorithm = "input";

struct EvalRecord {
  std::string utterance_id;
  Ear ear = Ear::Left;
  std::string algorithm;
  std::string noise_kind;
  int noise_angle_deg = 0;
  double target_snr_db = 0.0;
  Scope scope = Scope::Utterance;
  std::optional<std::string> phoneme;
  std::optional<std::string> category;
  double sir_in_db = 0.0;
  double sdr_out_db = 0.0;
  double sir_out_db = 0.0;
  double sar_out_db = 0.0;
  double segment_duration_s = 0.0;
  // Ordering only; not part of the CSV schema.
  double segment_start_s = 0.0;

  [[nodiscard]] double delta_sir_db() const noexcept { return sir_out_db - sir_in_db; }
  /// phoneme/category present iff scope == Phoneme.
  void validate() const;
};

/// (utterance, noise, snr, angle, algorithm, ear, scope, segment start).
bool record_less(const EvalRecord& a, const EvalRecord& b);
void sort_records(std::vector<EvalRecord>& records);

enum class RecordField {
  UtteranceId,
  Ear,
  Algorithm,
  NoiseKind,
  NoiseAngle,
  TargetSnr,
  Scope,
  Phoneme,
  Category,
};

/// Accepts the records.csv column names (utterance_id, ear, ..., category) and short
/// aliases (utterance, noise, angle, snr).
RecordField parse_record_field(std::string_view name);
std::string_view column_name(RecordField field);

/// Numeric fields compare numerically, everything else lexicographically.
using KeyValue = std::variant<double, std::string>;

KeyValue field_value(const EvalRecord& record, RecordField field);
std::string format_key(const KeyValue& value);

struct SummaryRow {
  std::vector<KeyValue> key;
  std::size_t count = 0;
  double mean_sir_in_db = 0.0;
  double mean_sdr_out_db = 0.0;
  double mean_sir_out_db = 0.0;
  double mean_sar_out_db = 0.0;
  double mean_delta_sir_db = 0.0;
  double total_duration_s = 0.0;
};

/// dB-domain means per group, rows sorted by key. Empty `group_by` yields one grand row.
/// Throws InvalidArgument on empty input.
std::vector<SummaryRow> aggregate(std::span<const EvalRecord> records,
                                  std::span<const RecordField> group_by);

inline constexpr std::string_view kRecordsHeader =
    "utterance_id,ear,algorithm,noise_kind,noise_angle_deg,target_snr_db,scope,phoneme,"
    "category,sir_in_db,sdr_out_db,sir_out_db,sar_out_db,segment_duration_s";

/// Fixed-point with `decimals` places; "-0.0000" is printed as "0.0000".
std::string format_fixed(double value, int decimals = 4);

void write_records_csv(std::ostream& out, std::span<const EvalRecord> records);
std::vector<EvalRecord> read_records_csv(std::istream& in, std::string_view source = "<stream>");

void write_summary_csv(std::ostream& out, std::span<const RecordField> group_by,
                       std::span<const SummaryRow> rows);

}  // namespace phoneval
