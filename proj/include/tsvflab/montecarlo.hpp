#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsvflab/bell.hpp"
#include "tsvflab/two_state.hpp"

namespace tsvf {

/// Name of the deterministic generator scheme, recorded in every
/// sampled-output payload so runs can be reproduced.
inline constexpr const char* kGeneratorName = "splitmix64-counter";

/// Fewest trials any estimator accepts; below this the binomial error
/// bars are too wide to mean anything.
inline constexpr std::uint64_t kMinTrials = 1000;

/// Counter-based deterministic stream: every trial derives its state
/// directly from (seed, stream, trial_index), so results are independent
/// of evaluation order and identical under any parallel schedule. Within
/// a trial, successive draws walk a splitmix64 sequence.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  std::uint64_t next_u64();

 private:
  std::uint64_t state_;
};

/// Draws an index from an explicit probability vector (entries ≥ 0,
/// summing to 1 within tolerances().input). Uses the cumulative-sum
/// inversion of one uniform draw; boundary ties resolve to the lower
/// index. An exactly-zero probability is never selected.
std::size_t sample_categorical(std::span<const double> probabilities,
                               TrialRng& rng);

/// One simulated run of a pre/post-selected experiment.
struct TrialOutcome {
  bool postselected = false;                        // final test found |φ⟩
  std::optional<std::size_t> intermediate_outcome;  // if a probe ran
};

/// Samples a single trial: prepare |ψ⟩, optionally perform the
/// intermediate projective measurement (Born-sampled, state collapsed
/// and renormalized; the IntermediateMeasurement's `outcome` field is
/// ignored — the outcome is drawn), evolve to t_f, then Born-sample the
/// final test {|φ⟩⟨φ|, 1−|φ⟩⟨φ|}.
TrialOutcome sample_trajectory(
    const TwoStateVector& tsv,
    const std::optional<IntermediateMeasurement>& protocol, TrialRng& rng);

/// Frequency estimates from one seeded ensemble. `trials` is the number
/// of trajectories sampled; `conditioning_count` the size of the set the
/// frequencies are conditioned on; `postselected_count` the trajectories
/// that passed the final test. Standard errors are binomial,
/// sqrt(f(1−f)/conditioning_count).
struct EnsembleStats {
  std::uint64_t trials = 0;
  std::uint64_t postselected_count = 0;
  std::uint64_t conditioning_count = 0;
  std::vector<double> conditional_frequencies;
  std::vector<double> standard_errors;
  std::uint64_t seed = 0;
};

/// Estimates the outcome distribution of `partition` measured at time t,
/// conditioned on post-selection — the sampled counterpart of
/// abl_probabilities, one frequency per partition element (they sum
/// to 1). Requires trials ≥ kMinTrials; throws EmptyEnsembleError if no
/// trial survives post-selection. `stream` separates estimators sharing
/// one seed.
EnsembleStats estimate_conditional(const TwoStateVector& tsv,
                                   std::span<const Operator> partition,
                                   double t, std::uint64_t trials,
                                   std::uint64_t seed,
                                   std::uint64_t stream = 0);

/// Which intermediate outcome the rate denominator is restricted to.
struct ConditionedOn {
  std::size_t outcome = 0;
};

/// Estimates the post-selection success rate. With a protocol, the
/// intermediate measurement is performed each trial; with `conditioned`
/// also set, only trials whose drawn outcome matches enter the
/// denominator. Frequencies come back as {success, failure}. Requires
/// trials ≥ kMinTrials; throws EmptyEnsembleError when the conditioning
/// set ends up empty.
EnsembleStats estimate_postselection_rate(
    const TwoStateVector& tsv, std::uint64_t trials, std::uint64_t seed,
    const std::optional<IntermediateMeasurement>& protocol = {},
    const std::optional<ConditionedOn>& conditioned = {},
    std::uint64_t stream = 0);

/// Sampled CHSH quartet: per-trial joint ±1 outcomes for each setting
/// pair (streams stream_base..stream_base+3), `trials` trials per pair.
/// `s` is built from the four sampled correlators; `std_error` combines
/// the four binomial errors in quadrature.
struct SampledChsh {
  double s = 0.0;
  double std_error = 0.0;
  std::array<double, 4> correlators{};
  std::array<double, 4> correlator_errors{};
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

SampledChsh sample_chsh(const StateVector& state, const MeasurementSetting& a,
                        const MeasurementSetting& a_prime,
                        const MeasurementSetting& b,
                        const MeasurementSetting& b_prime,
                        std::uint64_t trials, std::uint64_t seed,
                        std::uint64_t stream_base = 0);

}  // namespace tsvf
