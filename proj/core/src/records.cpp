#include "phoneval/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "phoneval/error.hpp"

namespace phoneval {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

double parse_double(const std::string& text, std::string_view source, std::size_t line_no) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw FormatError(std::string(source) + ":" + std::to_string(line_no) +
                      ": malformed number '" + text + "'");
  }
  return value;
}

void check_csv_safe(const std::string& value, std::string_view what) {
  if (value.find_first_of(",\n\r\"") != std::string::npos) {
    throw InvalidArgument(std::string(what) + " '" + value + "' contains a CSV delimiter");
  }
}

}  // namespace

std::string_view to_string(Scope scope) {
  return scope == Scope::Utterance ? "utterance" : "phoneme";
}

Scope parse_scope(std::string_view name) {
  if (name == "utterance") return Scope::Utterance;
  if (name == "phoneme") return Scope::Phoneme;
  throw InvalidArgument("unknown scope '" + std::string(name) + "'");
}

void EvalRecord::validate() const {
  const bool phoneme_scope = scope == Scope::Phoneme;
  if (phoneme.has_value() != phoneme_scope || category.has_value() != phoneme_scope) {
    throw InvalidArgument("record for '" + utterance_id +
                          "': phoneme and category must be set exactly for phoneme scope");
  }
  if (utterance_id.empty() || algorithm.empty() || noise_kind.empty()) {
    throw InvalidArgument("record has an empty identifier field");
  }
}

bool record_less(const EvalRecord& a, const EvalRecord& b) {
  const auto key = [](const EvalRecord& r) {
    return std::tie(r.utterance_id, r.noise_kind, r.target_snr_db, r.noise_angle_deg, r.algorithm,
                    r.ear, r.scope, r.segment_start_s);
  };
  return key(a) < key(b);
}

void sort_records(std::vector<EvalRecord>& records) {
  std::stable_sort(records.begin(), records.end(), record_less);
}

RecordField parse_record_field(std::string_view name) {
  if (name == "utterance_id" || name == "utterance") return RecordField::UtteranceId;
  if (name == "ear") return RecordField::Ear;
  if (name == "algorithm") return RecordField::Algorithm;
  if (name == "noise_kind" || name == "noise") return RecordField::NoiseKind;
  if (name == "noise_angle_deg" || name == "angle") return RecordField::NoiseAngle;
  if (name == "target_snr_db" || name == "snr") return RecordField::TargetSnr;
  if (name == "scope") return RecordField::Scope;
  if (name == "phoneme") return RecordField::Phoneme;
  if (name == "category") return RecordField::Category;
  throw InvalidArgument("unknown record field '" + std::string(name) + "'");
}

std::string_view column_name(RecordField field) {
  switch (field) {
    case RecordField::UtteranceId: return "utterance_id";
    case RecordField::Ear: return "ear";
    case RecordField::Algorithm: return "algorithm";
    case RecordField::NoiseKind: return "noise_kind";
    case RecordField::NoiseAngle: return "noise_angle_deg";
    case RecordField::TargetSnr: return "target_snr_db";
    case RecordField::Scope: return "scope";
    case RecordField::Phoneme: return "phoneme";
    case RecordField::Category: return "category";
  }
  return "?";
}

KeyValue field_value(const EvalRecord& r, RecordField field) {
  switch (field) {
    case RecordField::UtteranceId: return r.utterance_id;
    case RecordField::Ear: return std::string(to_string(r.ear));
    case RecordField::Algorithm: return r.algorithm;
    case RecordField::NoiseKind: return r.noise_kind;
    case RecordField::NoiseAngle: return static_cast<double>(r.noise_angle_deg);
    case RecordField::TargetSnr: return r.target_snr_db;
    case RecordField::Scope: return std::string(to_string(r.scope));
    case RecordField::Phoneme: return r.phoneme.value_or("");
    case RecordField::Category: return r.category.value_or("");
  }
  return std::string();
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string format_key(const KeyValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  const double d = std::get<double>(value);
  if (d == std::floor(d) && std::abs(d) < 1e15) return format_fixed(d, 0);
  return format_fixed(d, 4);
}

std::vector<SummaryRow> aggregate(std::span<const EvalRecord> records,
                                  std::span<const RecordField> group_by) {
  if (records.empty()) throw InvalidArgument("aggregate: no records");
  struct Sums {
    std::size_t count = 0;
    double sir_in = 0, sdr = 0, sir = 0, sar = 0, delta = 0, duration = 0;
  };
  std::map<std::vector<KeyValue>, Sums> groups;
  for (const auto& r : records) {
    std::vector<KeyValue> key;
    key.reserve(group_by.size());
    for (auto f : group_by) key.push_back(field_value(r, f));
    auto& s = groups[std::move(key)];
    ++s.count;
    s.sir_in += r.sir_in_db;
    s.sdr += r.sdr_out_db;
    s.sir += r.sir_out_db;
    s.sar += r.sar_out_db;
    s.delta += r.delta_sir_db();
    s.duration += r.segment_duration_s;
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, s] : groups) {
    const double n = static_cast<double>(s.count);
    rows.push_back(SummaryRow{key, s.count, s.sir_in / n, s.sdr / n, s.sir / n, s.sar / n,
                              s.delta / n, s.duration});
  }
  return rows;
}

void write_records_csv(std::ostream& out, std::span<const EvalRecord> records) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    r.validate();
    check_csv_safe(r.utterance_id, "utterance id");
    check_csv_safe(r.phoneme.value_or(""), "phoneme");
    check_csv_safe(r.category.value_or(""), "category");
    out << r.utterance_id << ',' << to_string(r.ear) << ',' << r.algorithm << ',' << r.noise_kind
        << ',' << r.noise_angle_deg << ',' << format_key(r.target_snr_db) << ','
        << to_string(r.scope) << ',' << r.phoneme.value_or("") << ','
        << r.category.value_or("") << ',' << format_fixed(r.sir_in_db) << ','
        << format_fixed(r.sdr_out_db) << ',' << format_fixed(r.sir_out_db) << ','
        << format_fixed(r.sar_out_db) << ',' << format_fixed(r.segment_duration_s) << '\n';
  }
}

std::vector<EvalRecord> read_records_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError(std::string(source) + ": empty records file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) {
    throw FormatError(std::string(source) + ":1: unexpected records header");
  }
  std::vector<EvalRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_fields(line);
    if (f.size() != 14) {
      throw FormatError(std::string(source) + ":" + std::to_string(line_no) +
                        ": expected 14 fields");
    }
    EvalRecord r;
    try {
      r.utterance_id = f[0];
      r.ear = parse_ear(f[1]);
      r.algorithm = f[2];
      r.noise_kind = f[3];
      r.noise_angle_deg = static_cast<int>(parse_double(f[4], source, line_no));
      r.target_snr_db = parse_double(f[5], source, line_no);
      r.scope = parse_scope(f[6]);
      if (r.scope == Scope::Phoneme) {
        r.phoneme = f[7];
        r.category = f[8];
      }
      r.sir_in_db = parse_double(f[9], source, line_no);
      r.sdr_out_db = parse_double(f[10], source, line_no);
      r.sir_out_db = parse_double(f[11], source, line_no);
      r.sar_out_db = parse_double(f[12], source, line_no);
      r.segment_duration_s = parse_double(f[13], source, line_no);
      r.validate();
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(std::ostream& out, std::span<const RecordField> group_by,
                       std::span<const SummaryRow> rows) {
  for (auto f : group_by) out << column_name(f) << ',';
  out << "count,mean_sir_in_db,mean_sdr_out_db,mean_sir_out_db,mean_sar_out_db,"
         "mean_delta_sir_db\n";
  for (const auto& row : rows) {
    for (const auto& k : row.key) out << format_key(k) << ',';
    out << row.count << ',' << format_fixed(row.mean_sir_in_db) << ','
        << format_fixed(row.mean_sdr_out_db) << ',' << format_fixed(row.mean_sir_out_db) << ','
        << format_fixed(row.mean_sar_out_db) << ',' << format_fixed(row.mean_delta_sir_db) << '\n';
  }
}

}  // namespace phoneval
