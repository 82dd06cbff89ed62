#include "tsvflab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsvflab/bell.hpp"
#include "tsvflab/errors.hpp"
#include "tsvflab/experiments.hpp"
#include "tsvflab/hilbert.hpp"
#include "tsvflab/montecarlo.hpp"
#include "tsvflab/report_io.hpp"
#include "tsvflab/settings.hpp"
#include "tsvflab/spec_file.hpp"
#include "tsvflab/two_state.hpp"

namespace tsvf {

namespace {

using Json = nlohmann::json;

constexpr const char* kOutputDirEnv = "TSVFLAB_OUTPUT_DIR";

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "three-boxes", "disappearing", "shutter",      "temporal-shutter",
      "empty-box",   "crossed-ifm",  "quantum-liar", "custom"};
  return names;
}

std::string format_time(double t) {
  std::ostringstream out;
  out << t;
  return out.str();
}

/// Relative --output paths land in $TSVFLAB_OUTPUT_DIR when it is set.
std::string resolve_output_path(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir == nullptr || *dir == '\0') return path;
  return (fs::path(dir) / p).string();
}

/// Writes through `write` to stdout or to the resolved --output file.
template <typename WriteFn>
int emit(const std::string& output, std::ostream& out, std::ostream& err,
         const WriteFn& write) {
  if (output.empty()) {
    write(out);
    return kExitOk;
  }
  const std::string path = resolve_output_path(output);
  std::ofstream file(path);
  if (!file) {
    err << "cannot open output file '" << path << "'\n";
    return kExitInput;
  }
  write(file);
  return kExitOk;
}

double binomial_error(double frequency, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, frequency * (1.0 - frequency)) /
                   static_cast<double>(n));
}

/// Sampling rows for a pre/post-selected system: the bare selection
/// rate, each partition's conditional outcome frequencies at the first
/// probe time, and the rate conditioned on each first-partition outcome.
/// Every row carries its closed-form expectation.
SampleReport sample_system(const TsvAnalysis& plan, const std::string& name,
                           std::uint64_t trials, std::uint64_t seed) {
  SampleReport report;
  report.experiment = name;
  report.seed = seed;
  report.trials = trials;
  const TwoStateVector& tsv = plan.tsv;
  const double t = plan.measurement_times.front();

  std::uint64_t stream = 0;
  {
    const EnsembleStats stats =
        estimate_postselection_rate(tsv, trials, seed, {}, {}, stream++);
    report.rows.push_back({"postselection_rate",
                           stats.conditional_frequencies[0],
                           stats.standard_errors[0],
                           postselection_probability(tsv),
                           stats.conditioning_count});
  }

  for (const NamedPartition& partition : plan.partitions) {
    const EnsembleStats stats = estimate_conditional(
        tsv, partition.projectors, t, trials, seed, stream++);
    const AblDistribution expected =
        abl_probabilities(tsv, partition.projectors, t);
    for (std::size_t j = 0; j < expected.probabilities.size(); ++j) {
      report.rows.push_back({"P[" + partition.name + "=" +
                                 expected.outcome_labels[j] + " @ t=" +
                                 format_time(t) + " | selected]",
                             stats.conditional_frequencies[j],
                             stats.standard_errors[j],
                             expected.probabilities[j],
                             stats.postselected_count});
    }
  }

  const NamedPartition& first = plan.partitions.front();
  const StateVector forward = tsv.forward_state(t);
  for (std::size_t j = 0; j < first.projectors.size(); ++j) {
    const double branch_norm = apply(first.projectors[j], forward).norm();
    const double branch = branch_norm * branch_norm;
    const std::string label = first.projectors[j].name();
    if (branch <= tolerances().input) {
      report.notes.push_back("outcome " + label + " has probability 0; " +
                             "conditioned rate omitted");
      ++stream;
      continue;
    }
    const IntermediateMeasurement protocol{first.projectors, j, t};
    const EnsembleStats stats = estimate_postselection_rate(
        tsv, trials, seed, protocol, ConditionedOn{j}, stream++);
    report.rows.push_back({"rate | " + first.name + "=" + label + " @ t=" +
                               format_time(t),
                           stats.conditional_frequencies[0],
                           stats.standard_errors[0],
                           postselection_probability(tsv, protocol) / branch,
                           stats.conditioning_count});
  }
  return report;
}

/// Sampling rows for a probe run: each trial draws "selection failed" or
/// one conditional probe mode from the exact joint distribution, so the
/// selection rate and the crossed-through fraction can be checked
/// against their closed forms.
SampleReport sample_probe_run(const ShutterRunReport& run,
                              const std::string& name, std::uint64_t trials,
                              std::uint64_t seed) {
  std::vector<double> weights;
  weights.reserve(1 + 2 * run.modes.size());
  weights.push_back(std::max(0.0, 1.0 - run.selection_rate));
  std::vector<bool> crossed;  // parallel to weights[1..]
  for (const ModeAmplitudeRow& mode : run.modes) {
    weights.push_back(std::norm(mode.reflected));
    crossed.push_back(false);
    weights.push_back(std::norm(mode.transmitted));
    crossed.push_back(true);
  }

  std::uint64_t selected = 0;
  std::uint64_t transmitted = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    TrialRng rng(seed, 4, trial);
    const std::size_t outcome = sample_categorical(weights, rng);
    if (outcome == 0) continue;
    ++selected;
    if (crossed[outcome - 1]) ++transmitted;
  }
  if (selected == 0) {
    throw EmptyEnsembleError("no trial passed the selection; cannot "
                             "estimate conditional probe statistics");
  }

  SampleReport report;
  report.experiment = name;
  report.seed = seed;
  report.trials = trials;
  const double rate = static_cast<double>(selected) /
                      static_cast<double>(trials);
  report.rows.push_back({"postselection_rate", rate,
                         binomial_error(rate, trials), run.selection_rate,
                         trials});
  const double crossed_fraction =
      static_cast<double>(transmitted) / static_cast<double>(selected);
  report.rows.push_back({"transmitted_fraction | selected", crossed_fraction,
                         binomial_error(crossed_fraction, selected),
                         run.transmitted_fraction, selected});
  report.notes.push_back("combo " + run.combination.to_string());
  return report;
}

void append_sampled_chsh(SampleReport& report, const StateVector& state,
                         const ChshResult& exact, std::uint64_t trials,
                         std::uint64_t seed, std::uint64_t stream_base) {
  const SampledChsh sampled =
      sample_chsh(state, exact.a, exact.a_prime, exact.b, exact.b_prime,
                  trials, seed, stream_base);
  const char* names[4] = {"E(a,b)", "E(a,b')", "E(a',b)", "E(a',b')"};
  for (int k = 0; k < 4; ++k) {
    report.rows.push_back({names[k], sampled.correlators[k],
                           sampled.correlator_errors[k],
                           exact.correlators[k], trials});
  }
  report.rows.push_back(
      {"S", sampled.s, sampled.std_error, exact.s, 4 * trials});
}

/// Draw kept/discarded for the pair-selection step, then sample the Bell
/// test on the kept pair at the optimal settings.
SampleReport sample_crossed_interferometers(std::uint64_t trials,
                                            std::uint64_t seed) {
  const ExperimentReport base = crossed_interferometers();
  const double discard_rate = base.scalars.at("discard_rate");

  std::uint64_t discarded = 0;
  const std::vector<double> weights = {1.0 - discard_rate, discard_rate};
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    TrialRng rng(seed, 0, trial);
    if (sample_categorical(weights, rng) == 1) ++discarded;
  }

  SampleReport report;
  report.experiment = base.experiment;
  report.seed = seed;
  report.trials = trials;
  const double observed = static_cast<double>(discarded) /
                          static_cast<double>(trials);
  report.rows.push_back({"discard_rate", observed,
                         binomial_error(observed, trials), discard_rate,
                         trials});

  const StateVector& pair = *base.conditional_state;
  const ChshResult exact = optimize_chsh(pair);
  append_sampled_chsh(report, pair, exact, trials, seed, 1);
  return report;
}

SampleReport sample_quantum_liar(double emission, std::uint64_t trials,
                                 std::uint64_t seed) {
  const StateVector state = excited_ground_superposition(emission);
  const double p_first_excited = 1.0 - emission * emission;

  std::vector<double> weights(static_cast<std::size_t>(state.dim()));
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    weights[static_cast<std::size_t>(i)] = std::norm(state.amplitude(i));
  }
  std::uint64_t first_excited = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    TrialRng rng(seed, 0, trial);
    // Basis order: ee, eg, ge, gg — the first atom is excited in 0 and 1.
    if (sample_categorical(weights, rng) <= 1) ++first_excited;
  }

  SampleReport report;
  report.experiment = "quantum-liar";
  report.seed = seed;
  report.trials = trials;
  const double observed = static_cast<double>(first_excited) /
                          static_cast<double>(trials);
  report.rows.push_back({"p_atom1_excited", observed,
                         binomial_error(observed, trials), p_first_excited,
                         trials});

  const ChshResult exact = optimize_chsh(state);
  append_sampled_chsh(report, state, exact, trials, seed, 1);
  return report;
}

/// Two-qubit state file: either a bare array of four [re, im] pairs or
/// {"amplitudes": [...], "labels": [...]}. The state is normalized.
StateVector parse_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SpecError("", "cannot open state file '" + path + "'");
  }
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SpecError("", std::string("invalid JSON: ") + e.what());
  }
  const Json* amps = &root;
  std::vector<std::string> labels = {"11", "12", "21", "22"};
  if (root.is_object()) {
    for (const auto& [key, value] : root.items()) {
      if (key != "amplitudes" && key != "labels") {
        throw SpecError("/" + key, "unknown field");
      }
    }
    const auto it = root.find("amplitudes");
    if (it == root.end()) {
      throw SpecError("", "missing required field 'amplitudes'");
    }
    amps = &*it;
    if (root.contains("labels")) {
      const Json& names = root["labels"];
      if (!names.is_array() || names.size() != 4) {
        throw SpecError("/labels", "expected 4 strings");
      }
      for (std::size_t i = 0; i < 4; ++i) {
        if (!names[i].is_string()) {
          throw SpecError("/labels/" + std::to_string(i),
                          "expected a string");
        }
        labels[i] = names[i].get<std::string>();
      }
    }
  }
  if (!amps->is_array() || amps->size() != 4) {
    throw SpecError("/amplitudes",
                    "expected 4 [re, im] pairs (one pair of qubits)");
  }
  Eigen::VectorXcd v(4);
  for (std::size_t i = 0; i < 4; ++i) {
    const Json& pair = (*amps)[i];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
        !pair[1].is_number()) {
      throw SpecError("/amplitudes/" + std::to_string(i),
                      "expected [re, im]");
    }
    v(static_cast<Eigen::Index>(i)) =
        Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  if (v.norm() <= tolerances().input) {
    throw SpecError("/amplitudes", "state must be nonzero");
  }
  return StateVector(std::move(v), std::move(labels)).normalized();
}

struct ParsedFlags {
  std::string experiment;
  std::string spec_path;
  std::string combo_text;
  std::string format = "table";
  std::string output;
  int sweep_points = 9;
  double emission = 1.0 / std::numbers::sqrt2;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 12345;
  bool spec_used = false;
  bool combo_used = false;
  bool sweep_used = false;
  bool emission_used = false;
};

/// Flag applicability checks shared by `run` and `mc`.
int check_experiment_flags(const ParsedFlags& flags, std::ostream& err) {
  const std::string& experiment = flags.experiment;
  if (experiment == "custom" && flags.spec_path.empty()) {
    err << "'" << "custom" << "' requires --spec <file>\n";
    return kExitUsage;
  }
  if (flags.spec_used && experiment != "custom") {
    err << "--spec applies only to the 'custom' experiment\n";
    return kExitUsage;
  }
  if (flags.combo_used && experiment != "temporal-shutter" &&
      experiment != "empty-box") {
    err << "--combo applies to temporal-shutter and empty-box\n";
    return kExitUsage;
  }
  if (flags.sweep_used && experiment != "disappearing" &&
      experiment != "custom") {
    err << "--sweep applies to disappearing and custom runs\n";
    return kExitUsage;
  }
  if (flags.sweep_used && flags.sweep_points < 3) {
    err << "--sweep needs at least 3 points\n";
    return kExitUsage;
  }
  if (flags.emission_used && experiment != "quantum-liar") {
    err << "--emission applies only to quantum-liar\n";
    return kExitUsage;
  }
  if (flags.emission_used &&
      !(flags.emission > 0.0 && flags.emission < 1.0)) {
    err << "--emission must lie strictly between 0 and 1\n";
    return kExitUsage;
  }
  return kExitOk;
}

int do_run(const ParsedFlags& flags, std::ostream& out, std::ostream& err) {
  if (const int code = check_experiment_flags(flags, err); code != kExitOk) {
    return code;
  }
  const std::string& experiment = flags.experiment;
  std::optional<ExperimentReport> report;

  if (experiment == "custom") {
    ExperimentSpecFile spec = parse_spec_file(flags.spec_path);
    spec.analysis.sweep_points = flags.sweep_points;
    report = analyze(spec.analysis, "custom");
  } else if (experiment == "three-boxes") {
    report = three_boxes();
  } else if (experiment == "disappearing") {
    report = disappearing_particle(flags.sweep_points);
  } else if (experiment == "shutter") {
    report = shutter_three_boxes();
  } else if (experiment == "crossed-ifm") {
    report = crossed_interferometers();
  } else if (experiment == "quantum-liar") {
    report = quantum_liar(flags.emission);
  } else {
    try {
      if (experiment == "temporal-shutter") {
        report = flags.combo_used
                     ? temporal_shutter(PathCombination::parse(flags.combo_text))
                     : temporal_shutter();
      } else {  // empty-box
        report = flags.combo_used
                     ? empty_box_probe(PathCombination::parse(flags.combo_text))
                     : empty_box_survey();
      }
    } catch (const ValidationError& e) {
      err << "invalid --combo: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  const ReportFormat format = parse_format(flags.format);
  return emit(flags.output, out, err, [&](std::ostream& sink) {
    write_report(*report, format, sink);
  });
}

int do_mc(const ParsedFlags& flags, std::ostream& out, std::ostream& err) {
  if (const int code = check_experiment_flags(flags, err); code != kExitOk) {
    return code;
  }
  if (flags.trials < kMinTrials) {
    err << "--trials must be at least " << kMinTrials << "\n";
    return kExitUsage;
  }
  const std::string& experiment = flags.experiment;
  const std::uint64_t trials = flags.trials;
  const std::uint64_t seed = flags.seed;
  std::optional<SampleReport> report;

  if (experiment == "custom") {
    const ExperimentSpecFile spec = parse_spec_file(flags.spec_path);
    report = sample_system(spec.analysis, "custom", trials, seed);
  } else if (experiment == "three-boxes") {
    TsvAnalysis plan{static_shutter_arena().tsv, box_partitions(), {0.5}, 0};
    report = sample_system(plan, "three-boxes", trials, seed);
  } else if (experiment == "disappearing") {
    TsvAnalysis plan{cycling_shutter_arena().tsv, box_partitions(), {0.0}, 0};
    report = sample_system(plan, "disappearing", trials, seed);
  } else if (experiment == "crossed-ifm") {
    report = sample_crossed_interferometers(trials, seed);
  } else if (experiment == "quantum-liar") {
    report = sample_quantum_liar(flags.emission, trials, seed);
  } else {
    try {
      if (experiment == "shutter") {
        report = sample_probe_run(
            simulate_combination(static_shutter_arena(),
                                 PathCombination::parse("t1:1,2")),
            "shutter", trials, seed);
      } else if (experiment == "temporal-shutter") {
        const PathCombination combo =
            flags.combo_used ? PathCombination::parse(flags.combo_text)
                             : certain_reflection_combination();
        report = sample_probe_run(
            simulate_combination(cycling_shutter_arena(), combo),
            "temporal-shutter", trials, seed);
      } else {  // empty-box
        const PathCombination combo =
            flags.combo_used ? PathCombination::parse(flags.combo_text)
                             : PathCombination::parse("t2:1,2");
        report = sample_probe_run(
            simulate_combination(cycling_shutter_arena(), combo), "empty-box",
            trials, seed);
      }
    } catch (const ValidationError& e) {
      err << "invalid --combo: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  const ReportFormat format = parse_format(flags.format);
  return emit(flags.output, out, err, [&](std::ostream& sink) {
    write_sample_report(*report, format, sink);
  });
}

int do_chsh(const std::string& state_name, std::uint64_t trials,
            std::uint64_t seed, const std::string& format_name,
            const std::string& output, std::ostream& out, std::ostream& err) {
  if (trials != 0 && trials < kMinTrials) {
    err << "--trials must be 0 (exact only) or at least " << kMinTrials
        << "\n";
    return kExitUsage;
  }
  std::optional<StateVector> state;
  if (state_name == "eq8" || state_name == "phi-plus") {
    state = phi_plus();
  } else if (state_name == "eq9" || state_name == "psi-plus") {
    state = psi_plus();
  } else {
    state = parse_state_file(state_name);
  }

  ChshReport report;
  report.state_name = state_name;
  report.result = optimize_chsh(*state);
  report.seed = seed;
  report.trials = trials;
  if (trials > 0) {
    report.sampled = sample_chsh(*state, report.result.a,
                                 report.result.a_prime, report.result.b,
                                 report.result.b_prime, trials, seed, 0);
  }

  const ReportFormat format = parse_format(format_name);
  return emit(output, out, err, [&](std::ostream& sink) {
    write_chsh_report(report, format, sink);
  });
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"pre/post-selected quantum system calculator"};
  app.name("tsvflab");
  app.require_subcommand(1);

  ParsedFlags flags;
  std::string chsh_state;
  std::uint64_t chsh_trials = 0;

  const auto add_output_flags = [&](CLI::App* cmd) {
    cmd->add_option("--format", flags.format,
                    "output format: json, csv, or table")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    cmd->add_option("--output", flags.output,
                    "write the report to this file instead of stdout "
                    "(relative paths land in $TSVFLAB_OUTPUT_DIR)");
  };
  const auto add_experiment_flags = [&](CLI::App* cmd) {
    cmd->add_option("experiment", flags.experiment,
                    "preset experiment name, or 'custom' with --spec")
        ->required()
        ->check(CLI::IsMember(experiment_names()));
    cmd->add_option("--spec", flags.spec_path,
                    "experiment file for 'custom' (JSON)");
    cmd->add_option("--combo", flags.combo_text,
                    "probed boxes per probe time, e.g. \"t1:1,3;t2:3;t3:2,3\"");
    cmd->add_option("--emission", flags.emission,
                    "emission amplitude for quantum-liar (strictly inside "
                    "(0,1))")
        ->capture_default_str();
  };

  CLI::App* run = app.add_subcommand(
      "run", "compute an experiment's closed-form report");
  add_experiment_flags(run);
  run->add_option("--sweep", flags.sweep_points,
                  "points in the weak-value sweep (>= 3)")
      ->capture_default_str();
  add_output_flags(run);

  CLI::App* mc = app.add_subcommand(
      "mc", "Monte Carlo estimates with closed-form expectations");
  add_experiment_flags(mc);
  mc->add_option("--trials", flags.trials, "trials per estimate")
      ->capture_default_str();
  mc->add_option("--seed", flags.seed, "base RNG seed")
      ->capture_default_str();
  add_output_flags(mc);

  CLI::App* chsh = app.add_subcommand(
      "chsh", "optimal Bell-test settings and value for a two-qubit state");
  chsh->add_option("--state", chsh_state,
                   "eq8 | eq9 | phi-plus | psi-plus | <state file>")
      ->required();
  chsh->add_option("--trials", chsh_trials,
                   "sampled trials per setting pair (0 = exact only)")
      ->capture_default_str();
  chsh->add_option("--seed", flags.seed, "base RNG seed")
      ->capture_default_str();
  add_output_flags(chsh);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    while (!target->get_subcommands().empty()) {
      target = target->get_subcommands().front();
    }
    out << target->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }
    err << e.what() << "\n";
    err << app.help();
    return kExitUsage;
  }

  flags.spec_used = run->count("--spec") > 0 || mc->count("--spec") > 0;
  flags.combo_used = run->count("--combo") > 0 || mc->count("--combo") > 0;
  flags.sweep_used = run->count("--sweep") > 0;
  flags.emission_used =
      run->count("--emission") > 0 || mc->count("--emission") > 0;

  try {
    if (run->parsed()) return do_run(flags, out, err);
    if (mc->parsed()) return do_mc(flags, out, err);
    return do_chsh(chsh_state, chsh_trials, flags.seed, flags.format,
                   flags.output, out, err);
  } catch (const SpecError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EmptyEnsembleError& e) {
    err << "empty ensemble: " << e.what() << "\n";
    return kExitComputation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}

}  // namespace tsvf
