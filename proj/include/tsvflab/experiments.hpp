#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsvflab/bell.hpp"
#include "tsvflab/two_state.hpp"

namespace tsvf {

/// A named resolution of the identity used for intermediate probes.
struct NamedPartition {
  std::string name;
  std::vector<Operator> projectors;
};

/// Which boxes are probed at which probe times. Keys are probe-slot
/// labels ("t1", "t2", "t3"); values are 1-based box indices.
///
/// Text form: "t1:1,3;t2:3;t3:2,3" — semicolon-separated slots, each
/// "label:box,box,...". Slots may appear in any order and are stored
/// sorted by label; boxes are deduplicated and sorted. Unknown labels
/// and out-of-range boxes are rejected when the combination is bound to
/// a probe system.
struct PathCombination {
  std::map<std::string, std::set<int>> slots;

  static PathCombination parse(const std::string& text);
  std::string to_string() const;
};

/// One photon mode of a shutter run and what happened to it.
struct SpacetimePath {
  enum class Status { kProbing, kReflected, kTransmitted, kBypass };
  std::string slot;  // probe-time label
  int box = 0;       // 1-based; 0 means none (bypass modes only)
  Status status = Status::kProbing;
};

/// Amplitude bookkeeping for a single probed (slot, box) pair, given
/// the particle's post-selection.
struct ModeAmplitudeRow {
  std::string slot;
  int box = 0;
  Complex reflected;    // amplitude on the bounced-back mode
  Complex transmitted;  // amplitude on the crossed-through mode
};

struct WeakValueRow {
  std::string operator_name;
  double time = 0.0;
  Complex value;
};

struct AblRow {
  std::string partition_name;
  double time = 0.0;
  std::vector<std::string> outcome_labels;
  std::vector<double> probabilities;
};

struct ConditionedRateRow {
  std::string condition;  // "" for the unconditioned rate
  double rate = 0.0;
};

/// A weak-value sweep over evolution time, one row per sample point.
struct SweepTable {
  std::vector<std::string> operator_names;   // column order
  std::vector<double> times;                 // one entry per row
  std::vector<std::vector<Complex>> values;  // [row][column]
};

/// Everything a single experiment computes, in presentation-ready form.
/// Writers (json/csv/table) consume this uniformly.
struct ExperimentReport {
  std::string experiment;
  std::map<std::string, std::string> parameters;
  std::vector<WeakValueRow> weak_values;
  std::vector<AblRow> abl_rows;
  std::vector<ConditionedRateRow> rates;
  std::optional<SweepTable> sweep;
  std::vector<ModeAmplitudeRow> mode_amplitudes;
  std::optional<StateVector> conditional_state;
  std::map<std::string, double> scalars;  // named single numbers
  std::vector<std::string> notes;
};

/// The canonical single-system analysis: a pre/post-selected system plus
/// the probe partitions and times to study. Presets and user spec files
/// both reduce to this, so either path yields byte-identical reports for
/// identical inputs.
struct TsvAnalysis {
  TwoStateVector tsv;
  std::vector<NamedPartition> partitions;
  std::vector<double> measurement_times;
  /// Weak-value sweep over [t0, t_f]; 0 disables. The sweep columns are
  /// the projectors of the first partition. A sweep is emitted only for
  /// a nonzero hamiltonian (a frozen system sweeps to constant rows).
  int sweep_points = 0;
};

/// Runs a TsvAnalysis. The report carries, for every partition and every
/// measurement time: the weak value of each projector, the conditional
/// outcome distribution, and — for the first partition — the
/// post-selection rate conditioned on each outcome, beside the
/// unconditioned rate. Adds a warning note for near-orthogonal
/// selections.
ExperimentReport analyze(const TsvAnalysis& plan, const std::string& name);

/// --- Preset catalog -----------------------------------------------------

/// The probe partitions shared by every box preset: the full three-way
/// box question plus each box-versus-the-other-two question. Order is
/// load-bearing: `analyze` conditions rates on the first partition.
std::vector<NamedPartition> box_partitions();

/// Particle in three boxes, prepared (|1⟩+|2⟩+|3⟩)/√3 and later found
/// (|1⟩+|2⟩−|3⟩)/√3, no evolution in between. Weakly probed occupations
/// read +1, +1, −1; looked for strongly, the particle is certainly in
/// box 1 — and certainly in box 2 if one looks there instead.
ExperimentReport three_boxes();

/// Three boxes with a coupling that cycles amplitude between boxes 1
/// and 2, prepared (|1⟩+i|2⟩+|3⟩)/√3 and found (−|1⟩+i|2⟩+|3⟩)/√3 at
/// t_f = π (coupling strength 1). Local occupations fade and return
/// while the total stays 1; the probe times {0, π/4, π/2} show the
/// certainty pattern moving from box 1 to box 2.
ExperimentReport disappearing_particle(int sweep_points = 9);

/// The boxed particle as seen by probe particles: the underlying
/// two-state system, the probe-slot grid, and the box count.
struct ShutterProbeSystem {
  TwoStateVector tsv;
  std::vector<std::string> slot_labels;  // e.g. {"t1", "t2", "t3"}
  std::vector<double> slot_times;        // parallel to slot_labels
  int boxes = 3;
};

/// Three boxes, no internal evolution, single probe slot: the arena of
/// the one-shot shutter run.
ShutterProbeSystem static_shutter_arena();

/// Three boxes with the box-1/box-2 cycling evolution and probe slots at
/// times {0, π/4, π/2} inside a [0, π] window: the arena of the
/// time-split runs.
ShutterProbeSystem cycling_shutter_arena();

/// Joint unitary evolution of the boxed particle and one probe mode per
/// probed (slot, box), conditioned on the particle's post-selection.
struct ShutterRunReport {
  PathCombination combination;
  /// Overlap² of the conditional photon state with the perfectly
  /// reflected, recombined reference.
  double reflection_fidelity = 0.0;
  /// Conditional probability that the probe crossed (any transmitted
  /// mode), given post-selection.
  double transmitted_fraction = 0.0;
  /// Overlap² of the transmitted component with the undisturbed,
  /// recombined reference, conditioned on transmission. Absent when
  /// nothing is transmitted.
  std::optional<double> transmission_fidelity;
  /// Post-selection probability of the boxed particle.
  double selection_rate = 0.0;
  /// Joint norm before the final test — 1 for unitary probing.
  double norm_before_postselection = 0.0;
  std::vector<ModeAmplitudeRow> modes;
  std::vector<SpacetimePath> mode_map;
  std::optional<StateVector> conditional_photon;  // normalized, labeled
};

ShutterRunReport simulate_combination(const ShutterProbeSystem& system,
                                      const PathCombination& combination);

/// The time-split combination t1:{1,3}, t2:{3}, t3:{2,3} — every probe
/// is certainly reflected even though no single box could have blocked
/// them all.
PathCombination certain_reflection_combination();

/// One-shot shutter: probe split across boxes 1 and 2 of the static
/// arena. Both probe parts bounce back and recombine perfectly; nothing
/// is transmitted; the particle's selection succeeds 1/9 of the time.
ExperimentReport shutter_three_boxes();

/// Time-split shutter run in the cycling arena. The default combination
/// restores the probe perfectly; other combinations leak.
ExperimentReport temporal_shutter(const PathCombination& combination);
ExperimentReport temporal_shutter();

/// Probes aimed at boxes that are certainly empty when probed: success
/// means transmission, and the transmitted parts recombine into the
/// initial probe state.
ExperimentReport empty_box_probe(const PathCombination& combination);

/// The documented empty-box runs side by side: {t2:{1,2}} (certain
/// transmission), {t2:{3}} (certain reflection), {t1:{2}} (probabilistic
/// transmission), and {t2:{1,3}} (the mixed variant), each reported.
ExperimentReport empty_box_survey();

/// Two 2-path interferometers whose arms cross pairwise: discarding the
/// would-collide branches leaves the maximally entangled pair
/// (|1⟩|1⟩+|2⟩|2⟩)/√2 at discard rate 1/2, certified by its Bell-test
/// violation.
ExperimentReport crossed_interferometers();

/// Two atoms that were never both excited end up entangled: atom 1 emits
/// with the given amplitude, the photon is certainly absorbed by atom 2,
/// and the joint state is α|e⟩|g⟩ + β|g⟩|e⟩ with β the emission
/// amplitude. Reports excitation probabilities and the optimized Bell
/// violation. Requires 0 < emission_amplitude < 1.
ExperimentReport quantum_liar(double emission_amplitude);
ExperimentReport quantum_liar();

}  // namespace tsvf
