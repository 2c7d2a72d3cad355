#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "phoneval/error.hpp"
#include "phoneval/log.hpp"
#include "phoneval/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

int cmd_validate(const std::string& path) {
  const auto cfg = phoneval::validate_config(path);
  const auto utterances = phoneval::discover_utterances(cfg);
  std::size_t aligned = 0;
  for (const auto& u : utterances) aligned += u.alignment_path.has_value();
  const std::size_t scenes =
      utterances.size() * cfg.noises.size() * cfg.snr_list.size() * cfg.angle_list.size();
  std::cout << "config ok: " << utterances.size() << " utterances (" << aligned
            << " aligned), " << scenes << " scenes, " << cfg.algorithms.size()
            << " algorithms, " << cfg.ears.size() << " ears\n";
  return kExitOk;
}

int cmd_run(const std::string& path, const std::string& output, std::size_t workers) {
  auto cfg = phoneval::validate_config(path);
  if (!output.empty()) cfg.output_dir = output;
  if (workers > 0) cfg.workers = workers;
  auto result = phoneval::run_matrix(cfg);
  if (result.records.empty()) {
    phoneval::logger()->error("every scene failed; nothing to report");
    return kExitPartial;
  }
  phoneval::emit_report(result.records, result.manifest, cfg.output_dir);
  phoneval::logger()->info("{} records written to {}", result.records.size(),
                           cfg.output_dir.string());
  if (!result.complete()) {
    phoneval::logger()->error("{} of {} scenes failed", result.manifest.failures.size(),
                              result.manifest.scenes.size());
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_report(const std::string& records_path, const std::vector<std::string>& group_by,
               const std::string& scope, const std::string& ear, const std::string& output) {
  std::ifstream in(records_path);
  if (!in) throw phoneval::IoError("cannot open " + records_path);
  auto records = phoneval::read_records_csv(in, records_path);
  std::erase_if(records, [&](const phoneval::EvalRecord& r) {
    return (!scope.empty() && phoneval::to_string(r.scope) != scope) ||
           (!ear.empty() && phoneval::to_string(r.ear) != ear);
  });
  std::vector<phoneval::RecordField> fields;
  for (const auto& name : group_by) fields.push_back(phoneval::parse_record_field(name));
  const auto rows = phoneval::aggregate(records, fields);
  if (output.empty()) {
    phoneval::write_summary_csv(std::cout, fields, rows);
  } else {
    std::ofstream out(output);
    if (!out) throw phoneval::IoError("cannot write " + output);
    phoneval::write_summary_csv(out, fields, rows);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phoneme-level evaluation of binaural speech enhancement"};
  app.set_version_flag("--version", std::string(phoneval::version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::size_t workers = 0;
  auto* run = app.add_subcommand("run", "Run the full evaluation matrix and write the report");
  run->add_option("config", config_path, "Run configuration file")->required();
  run->add_option("-o,--output", output, "Override output_dir");
  run->add_option("-j,--workers", workers, "Override the worker count");

  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  validate->add_option("config", config_path, "Run configuration file")->required();

  std::string records_path;
  std::vector<std::string> group_by;
  std::string scope;
  std::string ear;
  auto* report = app.add_subcommand("report", "Aggregate an existing records.csv");
  report->add_option("records", records_path, "records.csv from a previous run")->required();
  report->add_option("-g,--group-by", group_by, "Fields to group by")->delimiter(',');
  report->add_option("--scope", scope, "Keep only this scope (utterance|phoneme)");
  report->add_option("--ear", ear, "Keep only this ear (L|R)");
  report->add_option("-o,--output", output, "Write the summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, output, workers);
    if (*validate) return cmd_validate(config_path);
    if (*report) return cmd_report(records_path, group_by, scope, ear, output);
  } catch (const phoneval::ConfigError& e) {
    phoneval::logger()->error("{}", e.what());
    return kExitConfig;
  } catch (const phoneval::FormatError& e) {
    phoneval::logger()->error("{}", e.what());
    return kExitConfig;
  } catch (const phoneval::InvalidArgument& e) {
    phoneval::logger()->error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    phoneval::logger()->error("{}", e.what());
    return kExitPartial;
  }
  return kExitOk;
}
