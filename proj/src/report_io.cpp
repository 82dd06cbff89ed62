#include "tsvflab/report_io.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tsvflab/errors.hpp"
#include "tsvflab/montecarlo.hpp"

namespace tsvf {

namespace {

using OrderedJson = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1.0";

ReportFormat format_or_throw(const std::string& text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "table") return ReportFormat::kTable;
  throw ValidationError("unknown format '" + text +
                        "'; expected json, csv, or table");
}

OrderedJson complex_json(const Complex& z) {
  return OrderedJson::array({z.real(), z.imag()});
}

OrderedJson results_json(const ExperimentReport& report) {
  OrderedJson results;

  if (!report.weak_values.empty()) {
    OrderedJson rows = OrderedJson::array();
    for (const WeakValueRow& row : report.weak_values) {
      rows.push_back({{"operator", row.operator_name},
                      {"t", row.time},
                      {"value", complex_json(row.value)}});
    }
    results["weak_values"] = std::move(rows);
  }

  if (!report.abl_rows.empty()) {
    OrderedJson rows = OrderedJson::array();
    for (const AblRow& row : report.abl_rows) {
      rows.push_back({{"partition", row.partition_name},
                      {"t", row.time},
                      {"outcomes", row.outcome_labels},
                      {"probabilities", row.probabilities}});
    }
    results["abl"] = std::move(rows);
  }

  if (!report.rates.empty()) {
    OrderedJson rows = OrderedJson::array();
    for (const ConditionedRateRow& row : report.rates) {
      rows.push_back({{"condition", row.condition}, {"rate", row.rate}});
    }
    results["rates"] = std::move(rows);
  }

  if (report.sweep.has_value()) {
    const SweepTable& sweep = *report.sweep;
    OrderedJson table;
    table["operators"] = sweep.operator_names;
    OrderedJson rows = OrderedJson::array();
    for (std::size_t i = 0; i < sweep.times.size(); ++i) {
      OrderedJson row;
      row["t"] = sweep.times[i];
      OrderedJson values = OrderedJson::array();
      for (const Complex& z : sweep.values[i]) values.push_back(complex_json(z));
      row["values"] = std::move(values);
      rows.push_back(std::move(row));
    }
    table["rows"] = std::move(rows);
    results["sweep"] = std::move(table);
  }

  if (!report.mode_amplitudes.empty()) {
    OrderedJson rows = OrderedJson::array();
    for (const ModeAmplitudeRow& row : report.mode_amplitudes) {
      rows.push_back({{"slot", row.slot},
                      {"box", row.box},
                      {"reflected", complex_json(row.reflected)},
                      {"transmitted", complex_json(row.transmitted)}});
    }
    results["mode_amplitudes"] = std::move(rows);
  }

  if (report.conditional_state.has_value()) {
    const StateVector& state = *report.conditional_state;
    OrderedJson entry;
    OrderedJson amplitudes = OrderedJson::array();
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
      amplitudes.push_back(complex_json(state.amplitude(i)));
    }
    entry["amplitudes"] = std::move(amplitudes);
    if (state.has_labels()) entry["labels"] = state.labels();
    results["conditional_state"] = std::move(entry);
  }

  if (!report.scalars.empty()) {
    OrderedJson scalars;
    for (const auto& [key, value] : report.scalars) scalars[key] = value;
    results["scalars"] = std::move(scalars);
  }

  results["notes"] = report.notes;
  return results;
}

std::string fixed10(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

std::string fixed10(const Complex& z) {
  std::ostringstream out;
  out << std::setprecision(10) << z.real();
  if (z.imag() >= 0.0 || std::isnan(z.imag())) {
    out << "+" << std::setprecision(10) << z.imag() << "i";
  } else {
    out << "-" << std::setprecision(10) << -z.imag() << "i";
  }
  return out.str();
}

/// CSV field quoting per RFC 4180: quote when the value contains a
/// comma, quote, or newline.
std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string json_number(double v) {
  return OrderedJson(v).dump();
}

void write_sweep_csv(const SweepTable& sweep, std::ostream& out) {
  out << "eps_t";
  for (std::size_t k = 0; k < sweep.operator_names.size(); ++k) {
    out << ",reP" << (k + 1) << "w,imP" << (k + 1) << "w";
  }
  out << "\n";
  for (std::size_t i = 0; i < sweep.times.size(); ++i) {
    out << json_number(sweep.times[i]);
    for (const Complex& z : sweep.values[i]) {
      out << "," << json_number(z.real()) << "," << json_number(z.imag());
    }
    out << "\n";
  }
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  if (report.sweep.has_value()) {
    write_sweep_csv(*report.sweep, out);
    return;
  }
  out << "section,name,t,a,b\n";
  for (const WeakValueRow& row : report.weak_values) {
    out << "weak_value," << csv_field(row.operator_name) << ","
        << json_number(row.time) << "," << json_number(row.value.real())
        << "," << json_number(row.value.imag()) << "\n";
  }
  for (const AblRow& row : report.abl_rows) {
    for (std::size_t j = 0; j < row.probabilities.size(); ++j) {
      out << "abl," << csv_field(row.partition_name + ":" +
                                 row.outcome_labels[j])
          << "," << json_number(row.time) << ","
          << json_number(row.probabilities[j]) << ",\n";
    }
  }
  for (const ConditionedRateRow& row : report.rates) {
    out << "rate," << csv_field(row.condition) << ",,"
        << json_number(row.rate) << ",\n";
  }
  for (const ModeAmplitudeRow& row : report.mode_amplitudes) {
    out << "mode_reflected," << csv_field(row.slot + ":" +
                                          std::to_string(row.box))
        << ",," << json_number(row.reflected.real()) << ","
        << json_number(row.reflected.imag()) << "\n";
    out << "mode_transmitted," << csv_field(row.slot + ":" +
                                            std::to_string(row.box))
        << ",," << json_number(row.transmitted.real()) << ","
        << json_number(row.transmitted.imag()) << "\n";
  }
  for (const auto& [key, value] : report.scalars) {
    out << "scalar," << csv_field(key) << ",," << json_number(value)
        << ",\n";
  }
}

void write_report_table(const ExperimentReport& report, std::ostream& out) {
  out << "experiment: " << report.experiment << "\n";
  for (const auto& [key, value] : report.parameters) {
    out << "  " << key << " = " << value << "\n";
  }
  if (!report.weak_values.empty()) {
    out << "\nweak values\n";
    for (const WeakValueRow& row : report.weak_values) {
      out << "  " << row.operator_name << " @ t=" << fixed10(row.time)
          << "  ->  " << fixed10(row.value) << "\n";
    }
  }
  if (!report.abl_rows.empty()) {
    out << "\nconditional outcome probabilities\n";
    for (const AblRow& row : report.abl_rows) {
      out << "  " << row.partition_name << " @ t=" << fixed10(row.time)
          << ":";
      for (std::size_t j = 0; j < row.probabilities.size(); ++j) {
        out << "  " << row.outcome_labels[j] << "="
            << fixed10(row.probabilities[j]);
      }
      out << "\n";
    }
  }
  if (!report.rates.empty()) {
    out << "\nselection rates\n";
    for (const ConditionedRateRow& row : report.rates) {
      out << "  "
          << (row.condition.empty() ? std::string("unconditioned")
                                    : "given " + row.condition)
          << "  ->  " << fixed10(row.rate) << "\n";
    }
  }
  if (report.sweep.has_value()) {
    const SweepTable& sweep = *report.sweep;
    out << "\nweak-value sweep\n  t";
    for (const std::string& name : sweep.operator_names)
      out << "  " << name;
    out << "\n";
    for (std::size_t i = 0; i < sweep.times.size(); ++i) {
      out << "  " << fixed10(sweep.times[i]);
      for (const Complex& z : sweep.values[i]) out << "  " << fixed10(z);
      out << "\n";
    }
  }
  if (!report.mode_amplitudes.empty()) {
    out << "\nprobe modes (conditional amplitudes)\n";
    for (const ModeAmplitudeRow& row : report.mode_amplitudes) {
      out << "  slot " << row.slot << " box " << row.box
          << ": reflected " << fixed10(row.reflected) << ", transmitted "
          << fixed10(row.transmitted) << "\n";
    }
  }
  if (report.conditional_state.has_value()) {
    const StateVector& state = *report.conditional_state;
    out << "\nconditional state\n";
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
      out << "  |" << state.label(i) << ">  " << fixed10(state.amplitude(i))
          << "\n";
    }
  }
  if (!report.scalars.empty()) {
    out << "\nscalars\n";
    for (const auto& [key, value] : report.scalars) {
      out << "  " << key << " = " << fixed10(value) << "\n";
    }
  }
  for (const std::string& note : report.notes) {
    out << "\nnote: " << note << "\n";
  }
}

OrderedJson report_envelope(const std::string& experiment,
                            const std::map<std::string, std::string>& params) {
  OrderedJson envelope;
  envelope["schema_version"] = kSchemaVersion;
  envelope["experiment"] = experiment;
  OrderedJson parameters = OrderedJson::object();
  for (const auto& [key, value] : params) parameters[key] = value;
  envelope["parameters"] = std::move(parameters);
  return envelope;
}

}  // namespace

ReportFormat parse_format(const std::string& text) {
  return format_or_throw(text);
}

void write_report(const ExperimentReport& report, ReportFormat format,
                  std::ostream& out) {
  switch (format) {
    case ReportFormat::kJson: {
      OrderedJson envelope =
          report_envelope(report.experiment, report.parameters);
      envelope["results"] = results_json(report);
      out << envelope.dump(2) << "\n";
      return;
    }
    case ReportFormat::kCsv:
      write_report_csv(report, out);
      return;
    case ReportFormat::kTable:
      write_report_table(report, out);
      return;
  }
}

void write_sample_report(const SampleReport& report, ReportFormat format,
                         std::ostream& out) {
  switch (format) {
    case ReportFormat::kJson: {
      OrderedJson envelope = report_envelope(report.experiment, {});
      envelope["rng"] = {{"generator", kGeneratorName},
                         {"seed", report.seed},
                         {"trials", report.trials}};
      OrderedJson rows = OrderedJson::array();
      for (const SampleReport::Row& row : report.rows) {
        rows.push_back({{"name", row.name},
                        {"estimate", row.estimate},
                        {"std_error", row.std_error},
                        {"expected", row.expected},
                        {"conditioning_trials", row.conditioning_trials}});
      }
      OrderedJson results;
      results["estimates"] = std::move(rows);
      results["notes"] = report.notes;
      envelope["results"] = std::move(results);
      out << envelope.dump(2) << "\n";
      return;
    }
    case ReportFormat::kCsv: {
      out << "name,estimate,std_error,expected,conditioning_trials\n";
      for (const SampleReport::Row& row : report.rows) {
        out << csv_field(row.name) << "," << json_number(row.estimate) << ","
            << json_number(row.std_error) << "," << json_number(row.expected)
            << "," << row.conditioning_trials << "\n";
      }
      return;
    }
    case ReportFormat::kTable: {
      out << "experiment: " << report.experiment << " (sampled)\n";
      out << "  generator " << kGeneratorName << ", seed " << report.seed
          << ", trials " << report.trials << "\n\n";
      for (const SampleReport::Row& row : report.rows) {
        out << "  " << row.name << ": " << fixed10(row.estimate) << " +/- "
            << fixed10(row.std_error) << "  (expected "
            << fixed10(row.expected) << ", n=" << row.conditioning_trials
            << ")\n";
      }
      for (const std::string& note : report.notes) {
        out << "\nnote: " << note << "\n";
      }
      return;
    }
  }
}

namespace {

OrderedJson setting_json(const MeasurementSetting& setting) {
  return {{"theta", setting.theta}, {"phi", setting.phi}};
}

}  // namespace

void write_chsh_report(const ChshReport& report, ReportFormat format,
                       std::ostream& out) {
  const ChshResult& r = report.result;
  switch (format) {
    case ReportFormat::kJson: {
      OrderedJson envelope = report_envelope(
          "chsh", {{"state", report.state_name}});
      OrderedJson results;
      results["s"] = r.s;
      results["correlators"] = r.correlators;
      results["settings"] = {{"a", setting_json(r.a)},
                             {"a_prime", setting_json(r.a_prime)},
                             {"b", setting_json(r.b)},
                             {"b_prime", setting_json(r.b_prime)}};
      if (report.sampled.has_value()) {
        const SampledChsh& s = *report.sampled;
        envelope["rng"] = {{"generator", kGeneratorName},
                           {"seed", report.seed},
                           {"trials", report.trials}};
        results["sampled"] = {{"s", s.s},
                              {"std_error", s.std_error},
                              {"correlators", s.correlators},
                              {"correlator_errors", s.correlator_errors}};
      }
      envelope["results"] = std::move(results);
      out << envelope.dump(2) << "\n";
      return;
    }
    case ReportFormat::kCsv: {
      out << "name,value\n";
      out << "s," << json_number(r.s) << "\n";
      const char* names[4] = {"E(a;b)", "E(a;b')", "E(a';b)", "E(a';b')"};
      for (int k = 0; k < 4; ++k) {
        out << names[k] << "," << json_number(r.correlators[k]) << "\n";
      }
      if (report.sampled.has_value()) {
        out << "sampled_s," << json_number(report.sampled->s) << "\n";
        out << "sampled_std_error," << json_number(report.sampled->std_error)
            << "\n";
      }
      return;
    }
    case ReportFormat::kTable: {
      out << "state: " << report.state_name << "\n";
      out << "  S = " << fixed10(r.s) << "\n";
      const char* names[4] = {"E(a,b)  ", "E(a,b') ", "E(a',b) ",
                              "E(a',b')"};
      for (int k = 0; k < 4; ++k) {
        out << "  " << names[k] << " = " << fixed10(r.correlators[k]) << "\n";
      }
      out << "  a = (theta " << fixed10(r.a.theta) << ", phi "
          << fixed10(r.a.phi) << ")\n";
      out << "  a' = (theta " << fixed10(r.a_prime.theta) << ", phi "
          << fixed10(r.a_prime.phi) << ")\n";
      out << "  b = (theta " << fixed10(r.b.theta) << ", phi "
          << fixed10(r.b.phi) << ")\n";
      out << "  b' = (theta " << fixed10(r.b_prime.theta) << ", phi "
          << fixed10(r.b_prime.phi) << ")\n";
      if (report.sampled.has_value()) {
        out << "  sampled S = " << fixed10(report.sampled->s) << " +/- "
            << fixed10(report.sampled->std_error) << "  (generator "
            << kGeneratorName << ", seed " << report.seed << ", trials "
            << report.trials << ")\n";
      }
      return;
    }
  }
}

}  // namespace tsvf
