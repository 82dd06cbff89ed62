#pragma once

#include <iosfwd>
#include <string>

#include "tsvflab/experiments.hpp"
#include "tsvflab/montecarlo.hpp"

namespace tsvf {

enum class ReportFormat { kJson, kCsv, kTable };

/// Parses "json" / "csv" / "table"; throws ValidationError otherwise.
ReportFormat parse_format(const std::string& text);

/// Serializes a report. JSON carries every section; CSV emits the sweep
/// table when present (columns: eps_t, then re/im pairs per operator)
/// and otherwise flat key,value rows; table is aligned human-readable
/// text. All numeric output uses max_digits10 round-tripping in json/csv.
void write_report(const ExperimentReport& report, ReportFormat format,
                  std::ostream& out);

/// Sampling summary payload for estimate-type runs. Always records the
/// generator name, seed, and trial count beside each estimate so any
/// number can be reproduced.
struct SampleReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  struct Row {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double expected = 0.0;  // closed-form value for comparison
    std::uint64_t conditioning_trials = 0;
  };
  std::vector<Row> rows;
  std::vector<std::string> notes;
};

void write_sample_report(const SampleReport& report, ReportFormat format,
                         std::ostream& out);

/// Bell-test payload for the settings-optimization command.
struct ChshReport {
  std::string state_name;
  ChshResult result;
  std::optional<SampledChsh> sampled;  // present when trials requested
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
};

void write_chsh_report(const ChshReport& report, ReportFormat format,
                       std::ostream& out);

}  // namespace tsvf
