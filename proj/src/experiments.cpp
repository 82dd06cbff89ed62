#include "tsvflab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

namespace {

/// Short deterministic time tag used in row labels ("0", "0.785398").
std::string time_tag(double t) {
  std::ostringstream out;
  out << t;
  return out.str();
}

StateVector box_labeled(Eigen::VectorXcd amplitudes) {
  return StateVector(std::move(amplitudes), {"1", "2", "3"});
}

TwoStateVector three_boxes_tsv() {
  Eigen::VectorXcd pre(3), post(3);
  pre << 1, 1, 1;
  post << 1, 1, -1;
  return TwoStateVector(box_labeled(pre), box_labeled(post),
                        Operator::zero(3).with_name("H"), 0.0, 1.0);
}

/// Couples boxes 1 and 2: amplitude cycles between them with period 2π
/// while box 3 is untouched.
Operator cycling_hamiltonian() {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(0, 1) = 1.0;
  h(1, 0) = 1.0;
  return Operator(std::move(h), {.hermitian = true}, "H");
}

TwoStateVector disappearing_tsv() {
  const Complex i{0.0, 1.0};
  Eigen::VectorXcd pre(3), post(3);
  pre << 1.0, i, 1.0;
  post << -1.0, i, 1.0;
  return TwoStateVector(box_labeled(pre), box_labeled(post),
                        cycling_hamiltonian(), 0.0, std::numbers::pi);
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::vector<NamedPartition> box_partitions() {
  std::vector<NamedPartition> partitions;
  partitions.push_back(
      {"boxes",
       {basis_projector(3, {0}), basis_projector(3, {1}),
        basis_projector(3, {2})}});
  partitions.push_back(
      {"box1_vs_rest", {basis_projector(3, {0}), basis_projector(3, {1, 2})}});
  partitions.push_back(
      {"box2_vs_rest", {basis_projector(3, {1}), basis_projector(3, {0, 2})}});
  partitions.push_back(
      {"box3_vs_rest", {basis_projector(3, {2}), basis_projector(3, {0, 1})}});
  return partitions;
}

ExperimentReport analyze(const TsvAnalysis& plan, const std::string& name) {
  const TwoStateVector& tsv = plan.tsv;
  if (plan.partitions.empty()) {
    throw ValidationError("analysis needs at least one partition");
  }
  for (const NamedPartition& partition : plan.partitions) {
    validate_partition(partition.projectors, tsv.dim());
  }
  if (plan.measurement_times.empty()) {
    throw ValidationError("analysis needs at least one measurement time");
  }

  ExperimentReport report;
  report.experiment = name;

  if (tsv.near_orthogonal()) {
    report.notes.push_back(
        "warning: pre and post selections are nearly orthogonal "
        "(|overlap| < 1e-6); weak values may be arbitrarily large");
  }

  // Weak value of every probe projector at every time, deduplicated by
  // (operator, time) since partitions share projectors.
  std::set<std::pair<std::string, double>> seen;
  for (double t : plan.measurement_times) {
    for (const NamedPartition& partition : plan.partitions) {
      for (const Operator& p : partition.projectors) {
        if (!seen.emplace(p.name(), t).second) continue;
        const WeakValueResult w = weak_value(tsv, p, t);
        report.weak_values.push_back({w.operator_name, t, w.value});
      }
    }
  }

  for (double t : plan.measurement_times) {
    for (const NamedPartition& partition : plan.partitions) {
      const AblDistribution dist =
          abl_probabilities(tsv, partition.projectors, t);
      report.abl_rows.push_back(
          {partition.name, t, dist.outcome_labels, dist.probabilities});
    }
  }

  // Selection rates: bare, then conditioned on each outcome of the first
  // partition at each time (the probability that the final test succeeds
  // GIVEN the intermediate result, Bayes from the joint probability).
  const double bare_rate = postselection_probability(tsv);
  report.rates.push_back({"", bare_rate});
  report.scalars["postselection_rate"] = bare_rate;
  const NamedPartition& first = plan.partitions.front();
  for (double t : plan.measurement_times) {
    for (std::size_t j = 0; j < first.projectors.size(); ++j) {
      const StateVector at_t = tsv.forward_state(t);
      const double branch =
          apply(first.projectors[j], at_t).amplitudes().squaredNorm();
      const std::string condition =
          first.projectors[j].name() + "@t=" + time_tag(t);
      if (branch <= tolerances().input) {
        report.notes.push_back("outcome " + condition +
                               " has probability 0; conditioned rate "
                               "omitted");
        continue;
      }
      IntermediateMeasurement m;
      m.partition = first.projectors;
      m.outcome = j;
      m.t = t;
      const double joint = postselection_probability(tsv, m);
      report.rates.push_back({condition, joint / branch});
    }
  }

  // Weak-value sweep over the whole window, columns from the first
  // partition. A frozen system (H = 0) would sweep to constant rows, so
  // the table is emitted only when there is evolution to show.
  if (plan.sweep_points > 0 &&
      !tsv.hamiltonian().entries().isZero(0.0)) {
    if (plan.sweep_points < 3) {
      throw ValidationError("a sweep needs at least 3 points, got " +
                            std::to_string(plan.sweep_points));
    }
    SweepTable sweep;
    for (const Operator& p : first.projectors) {
      sweep.operator_names.push_back(p.name());
    }
    const int n = plan.sweep_points;
    for (int i = 0; i < n; ++i) {
      const double t =
          tsv.t0() + (tsv.t_f() - tsv.t0()) * i / static_cast<double>(n - 1);
      sweep.times.push_back(t);
      std::vector<Complex> row;
      row.reserve(first.projectors.size());
      for (const Operator& p : first.projectors) {
        row.push_back(weak_value(tsv, p, t).value);
      }
      sweep.values.push_back(std::move(row));
    }
    report.sweep = std::move(sweep);
  }

  return report;
}

ExperimentReport three_boxes() {
  TsvAnalysis plan{three_boxes_tsv(), box_partitions(), {0.5}, 0};
  return analyze(plan, "three-boxes");
}

ExperimentReport disappearing_particle(int sweep_points) {
  if (sweep_points < 3) {
    throw ValidationError("a sweep needs at least 3 points, got " +
                          std::to_string(sweep_points));
  }
  TsvAnalysis plan{disappearing_tsv(),
                   box_partitions(),
                   {0.0, std::numbers::pi / 4, std::numbers::pi / 2},
                   sweep_points};
  ExperimentReport report = analyze(plan, "disappearing");
  report.parameters["sweep_points"] = std::to_string(sweep_points);
  return report;
}

/// --- Shutter machinery ---------------------------------------------------

PathCombination PathCombination::parse(const std::string& text) {
  PathCombination combination;
  if (text.empty()) {
    throw ValidationError("path combination is empty");
  }
  std::istringstream slots(text);
  std::string slot_spec;
  while (std::getline(slots, slot_spec, ';')) {
    const std::size_t colon = slot_spec.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw ValidationError("path combination slot '" + slot_spec +
                            "' is not of the form label:box,box,...");
    }
    const std::string label = slot_spec.substr(0, colon);
    if (combination.slots.count(label) != 0) {
      throw ValidationError("path combination repeats slot '" + label + "'");
    }
    std::set<int>& boxes = combination.slots[label];
    std::istringstream box_list(slot_spec.substr(colon + 1));
    std::string box_text;
    while (std::getline(box_list, box_text, ',')) {
      std::size_t used = 0;
      int box = 0;
      try {
        box = std::stoi(box_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != box_text.size() || box_text.empty()) {
        throw ValidationError("path combination box '" + box_text +
                              "' in slot '" + label + "' is not an integer");
      }
      boxes.insert(box);
    }
    if (boxes.empty()) {
      throw ValidationError("path combination slot '" + label +
                            "' lists no boxes");
    }
  }
  return combination;
}

std::string PathCombination::to_string() const {
  std::ostringstream out;
  bool first_slot = true;
  for (const auto& [label, boxes] : slots) {
    if (!first_slot) out << ';';
    first_slot = false;
    out << label << ':';
    bool first_box = true;
    for (int box : boxes) {
      if (!first_box) out << ',';
      first_box = false;
      out << box;
    }
  }
  return out.str();
}

ShutterProbeSystem static_shutter_arena() {
  return ShutterProbeSystem{three_boxes_tsv(), {"t1"}, {0.5}, 3};
}

ShutterProbeSystem cycling_shutter_arena() {
  return ShutterProbeSystem{
      disappearing_tsv(),
      {"t1", "t2", "t3"},
      {0.0, std::numbers::pi / 4, std::numbers::pi / 2},
      3};
}

PathCombination certain_reflection_combination() {
  return PathCombination::parse("t1:1,3;t2:3;t3:2,3");
}

namespace {

struct ProbedMode {
  std::size_t slot_index = 0;
  int box = 0;        // 1-based
  double split = 0.0;  // amplitude factor of the initial splitting
};

std::vector<ProbedMode> bind_combination(const ShutterProbeSystem& system,
                                         const PathCombination& combination) {
  if (combination.slots.empty()) {
    throw ValidationError("path combination lists no slots");
  }
  const double slot_split =
      1.0 / std::sqrt(static_cast<double>(combination.slots.size()));
  std::vector<ProbedMode> modes;
  for (const auto& [label, boxes] : combination.slots) {
    const auto it = std::find(system.slot_labels.begin(),
                              system.slot_labels.end(), label);
    if (it == system.slot_labels.end()) {
      throw ValidationError("path combination slot '" + label +
                            "' is not a probe slot of this system");
    }
    const std::size_t slot_index =
        static_cast<std::size_t>(it - system.slot_labels.begin());
    const double box_split =
        slot_split / std::sqrt(static_cast<double>(boxes.size()));
    for (int box : boxes) {
      if (box < 1 || box > system.boxes) {
        throw ValidationError("path combination box " + std::to_string(box) +
                              " out of range 1.." +
                              std::to_string(system.boxes));
      }
      modes.push_back({slot_index, box, box_split});
    }
  }
  // Stable probe order: by slot time, then box. std::map already yields
  // labels sorted, but slot labels need not sort like their times.
  std::sort(modes.begin(), modes.end(),
            [](const ProbedMode& a, const ProbedMode& b) {
              return std::tie(a.slot_index, a.box) <
                     std::tie(b.slot_index, b.box);
            });
  return modes;
}

}  // namespace

ShutterRunReport simulate_combination(const ShutterProbeSystem& system,
                                      const PathCombination& combination) {
  const std::vector<ProbedMode> modes = bind_combination(system, combination);
  const TwoStateVector& tsv = system.tsv;
  const Eigen::Index shutter_dim = tsv.dim();
  const std::size_t mode_count = modes.size();
  // Photon channels: per probed mode, an untouched "passing" channel 2m
  // and a bounced-back channel 2m+1.
  const Eigen::Index photon_dim =
      static_cast<Eigen::Index>(2 * mode_count);

  std::vector<std::string> photon_labels(2 * mode_count);
  for (std::size_t m = 0; m < mode_count; ++m) {
    const std::string tag = system.slot_labels[modes[m].slot_index] + "," +
                            std::to_string(modes[m].box);
    photon_labels[2 * m] = "p(" + tag + ")";
    photon_labels[2 * m + 1] = "r(" + tag + ")";
  }

  // Joint amplitudes, shutter-major: index = s * photon_dim + channel.
  Eigen::VectorXcd joint =
      Eigen::VectorXcd::Zero(shutter_dim * photon_dim);
  for (std::size_t m = 0; m < mode_count; ++m) {
    for (Eigen::Index s = 0; s < shutter_dim; ++s) {
      joint(s * photon_dim + static_cast<Eigen::Index>(2 * m)) =
          tsv.pre().amplitude(s) * modes[m].split;
    }
  }

  const auto evolve_shutter = [&](double from, double to) {
    if (to == from) return;
    const Operator u = unitary_of(tsv.hamiltonian(), to - from);
    Eigen::VectorXcd sub(shutter_dim);
    for (Eigen::Index ch = 0; ch < photon_dim; ++ch) {
      for (Eigen::Index s = 0; s < shutter_dim; ++s) {
        sub(s) = joint(s * photon_dim + ch);
      }
      sub = u.entries() * sub;
      for (Eigen::Index s = 0; s < shutter_dim; ++s) {
        joint(s * photon_dim + ch) = sub(s);
      }
    }
  };

  // Walk the slots in time order; at each, the contact interaction swaps
  // the passing and reflected channels of every probed box exactly on
  // the shutter component occupying that box.
  double now = tsv.t0();
  for (std::size_t slot = 0; slot < system.slot_labels.size(); ++slot) {
    evolve_shutter(now, system.slot_times[slot]);
    now = system.slot_times[slot];
    for (std::size_t m = 0; m < mode_count; ++m) {
      if (modes[m].slot_index != slot) continue;
      const Eigen::Index s = modes[m].box - 1;
      std::swap(joint(s * photon_dim + static_cast<Eigen::Index>(2 * m)),
                joint(s * photon_dim + static_cast<Eigen::Index>(2 * m + 1)));
    }
  }
  evolve_shutter(now, tsv.t_f());

  const double norm_before = joint.norm();

  // Post-select the shutter: conditional photon amplitudes
  // ⟨post| ⊗ 1 |joint⟩.
  Eigen::VectorXcd conditional = Eigen::VectorXcd::Zero(photon_dim);
  for (Eigen::Index ch = 0; ch < photon_dim; ++ch) {
    Complex amp(0.0, 0.0);
    for (Eigen::Index s = 0; s < shutter_dim; ++s) {
      amp += std::conj(tsv.post().amplitude(s)) * joint(s * photon_dim + ch);
    }
    conditional(ch) = amp;
  }

  const double selection_rate = conditional.squaredNorm();
  if (selection_rate <= 0.0) {
    throw EmptyEnsembleError(
        "the probed particle is never post-selected for this combination");
  }

  // References: the initial split recombines to 1 exactly when the
  // conditional amplitudes are proportional to the split weights — on
  // the reflected channels for shutter runs, on the passing channels for
  // empty-box runs.
  Complex reflected_overlap(0.0, 0.0);
  Complex passing_overlap(0.0, 0.0);
  double transmitted_power = 0.0;
  for (std::size_t m = 0; m < mode_count; ++m) {
    reflected_overlap += modes[m].split * conditional(2 * m + 1);
    passing_overlap += modes[m].split * conditional(2 * m);
    transmitted_power += std::norm(conditional(2 * m));
  }

  ShutterRunReport report;
  report.combination = combination;
  report.selection_rate = selection_rate;
  report.norm_before_postselection = norm_before;
  report.reflection_fidelity =
      clamp01(std::norm(reflected_overlap) / selection_rate);
  report.transmitted_fraction = clamp01(transmitted_power / selection_rate);
  constexpr double kAmplitudeFloor = 1e-12;
  if (transmitted_power > kAmplitudeFloor * kAmplitudeFloor) {
    report.transmission_fidelity =
        clamp01(std::norm(passing_overlap) / transmitted_power);
  }

  for (std::size_t m = 0; m < mode_count; ++m) {
    const std::string& slot = system.slot_labels[modes[m].slot_index];
    report.modes.push_back({slot, modes[m].box, conditional(2 * m + 1),
                            conditional(2 * m)});
    report.mode_map.push_back(
        {slot, modes[m].box, SpacetimePath::Status::kTransmitted});
    report.mode_map.push_back(
        {slot, modes[m].box, SpacetimePath::Status::kReflected});
  }

  report.conditional_photon =
      StateVector(conditional, photon_labels).normalized();
  return report;
}

namespace {

void fill_shutter_sections(ExperimentReport& report,
                           const ShutterRunReport& run) {
  report.parameters["combo"] = run.combination.to_string();
  report.mode_amplitudes = run.modes;
  report.conditional_state = run.conditional_photon;
  report.scalars["postselection_rate"] = run.selection_rate;
  report.scalars["reflection_fidelity"] = run.reflection_fidelity;
  report.scalars["transmitted_fraction"] = run.transmitted_fraction;
  report.scalars["norm_before_postselection"] =
      run.norm_before_postselection;
  report.rates.push_back({"", run.selection_rate});
  if (run.transmission_fidelity.has_value()) {
    report.scalars["transmission_fidelity"] = *run.transmission_fidelity;
  } else {
    report.notes.push_back(
        "nothing is transmitted; transmission fidelity undefined");
  }
}

}  // namespace

ExperimentReport shutter_three_boxes() {
  const ShutterProbeSystem arena = static_shutter_arena();
  const ShutterRunReport run =
      simulate_combination(arena, PathCombination::parse("t1:1,2"));
  ExperimentReport report;
  report.experiment = "shutter";
  fill_shutter_sections(report, run);
  report.notes.push_back(
      "both probe parts bounce back as if each box were blocked; the "
      "transmitted amplitudes cancel under the final selection");
  return report;
}

ExperimentReport temporal_shutter(const PathCombination& combination) {
  const ShutterProbeSystem arena = cycling_shutter_arena();
  const ShutterRunReport run = simulate_combination(arena, combination);
  ExperimentReport report;
  report.experiment = "temporal-shutter";
  fill_shutter_sections(report, run);
  report.scalars["fidelity"] = run.reflection_fidelity;
  return report;
}

ExperimentReport temporal_shutter() {
  return temporal_shutter(certain_reflection_combination());
}

ExperimentReport empty_box_probe(const PathCombination& combination) {
  const ShutterProbeSystem arena = cycling_shutter_arena();
  const ShutterRunReport run = simulate_combination(arena, combination);
  ExperimentReport report;
  report.experiment = "empty-box";
  fill_shutter_sections(report, run);
  if (run.transmission_fidelity.has_value()) {
    report.scalars["fidelity"] = *run.transmission_fidelity;
  }
  return report;
}

ExperimentReport empty_box_survey() {
  ExperimentReport report;
  report.experiment = "empty-box";
  const std::vector<std::string> combos{"t2:1,2", "t2:3", "t1:2", "t2:1,3"};
  for (const std::string& text : combos) {
    const ShutterRunReport run = simulate_combination(
        cycling_shutter_arena(), PathCombination::parse(text));
    const std::string key = "[" + text + "] ";
    report.scalars[key + "postselection_rate"] = run.selection_rate;
    report.scalars[key + "transmitted_fraction"] = run.transmitted_fraction;
    if (run.transmission_fidelity.has_value()) {
      report.scalars[key + "transmission_fidelity"] =
          *run.transmission_fidelity;
    } else {
      report.notes.push_back("[" + text +
                             "] nothing is transmitted; transmission "
                             "fidelity undefined");
    }
  }
  report.notes.push_back(
      "two variants are probed at the middle slot, boxes {1,2} and boxes "
      "{1,3}, and both are reported side by side");
  return report;
}

/// --- Entangling protocols ------------------------------------------------

ExperimentReport crossed_interferometers() {
  // Two balanced 2-path interferometers; arm 1 of each crosses arm 2 of
  // the other, so the joint branches 1⊗2 and 2⊗1 would collide and are
  // discarded when no collision is detected.
  Eigen::VectorXcd half(2);
  half << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  const StateVector one(half, {"1", "2"});
  const StateVector joints = tensor(one, one);

  Eigen::VectorXcd kept = joints.amplitudes();
  kept(1) = 0.0;
  kept(2) = 0.0;
  const double kept_power = kept.squaredNorm();
  const double discard_rate = 1.0 - kept_power;
  const StateVector conditional =
      StateVector(kept, joints.labels()).normalized();

  const ChshResult bell = optimize_chsh(conditional);

  ExperimentReport report;
  report.experiment = "crossed-ifm";
  report.conditional_state = conditional;
  report.scalars["discard_rate"] = discard_rate;
  report.scalars["kept_rate"] = kept_power;
  report.scalars["chsh_s"] = bell.s;
  report.notes.push_back(
      "branches 1⊗2 and 2⊗1 would collide; keeping only collision-free "
      "runs leaves the maximally correlated path pair");
  return report;
}

ExperimentReport quantum_liar(double emission_amplitude) {
  if (!(emission_amplitude > 0.0) || !(emission_amplitude < 1.0)) {
    throw ValidationError(
        "emission amplitude must lie strictly between 0 and 1, got " +
        std::to_string(emission_amplitude));
  }
  const StateVector state = excited_ground_superposition(emission_amplitude);
  const double alpha = std::sqrt(1.0 - emission_amplitude * emission_amplitude);
  const ChshResult bell = optimize_chsh(state);

  ExperimentReport report;
  report.experiment = "quantum-liar";
  report.parameters["emission_amplitude"] = time_tag(emission_amplitude);
  report.conditional_state = state;
  report.scalars["p_atom1_excited"] = alpha * alpha;
  report.scalars["p_atom2_excited"] =
      emission_amplitude * emission_amplitude;
  report.scalars["chsh_s"] = bell.s;
  report.notes.push_back(
      "the two atoms were never excited together, yet the Bell violation "
      "certifies their entanglement");
  return report;
}

ExperimentReport quantum_liar() {
  return quantum_liar(1.0 / std::numbers::sqrt2);
}

}  // namespace tsvf
