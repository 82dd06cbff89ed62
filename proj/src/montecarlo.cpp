#include "tsvflab/montecarlo.hpp"

#include <array>
#include <cmath>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 step: advance the state by the golden-ratio increment and
/// avalanche it into an output word.
std::uint64_t splitmix_next(std::uint64_t& state) {
  state += kGolden;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t avalanche(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix_next(s);
}

void require_enough_trials(std::uint64_t trials) {
  if (trials < kMinTrials) {
    throw ValidationError("at least " + std::to_string(kMinTrials) +
                          " trials are required for a meaningful estimate, "
                          "got " +
                          std::to_string(trials));
  }
}

double binomial_error(double f, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(f * (1.0 - f) / static_cast<double>(n));
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t trial) {
  // Avalanche the (seed, stream, trial) coordinates into the trial's
  // starting state; no sequential warm-up, so any trial is reachable
  // without generating its predecessors.
  std::uint64_t s = avalanche(seed);
  s = avalanche(s ^ (kGolden * (stream + 1)));
  s = avalanche(s ^ (kGolden * (trial + 1)));
  state_ = s;
}

std::uint64_t TrialRng::next_u64() { return splitmix_next(state_); }

double TrialRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t sample_categorical(std::span<const double> probabilities,
                               TrialRng& rng) {
  if (probabilities.empty()) {
    throw ValidationError("cannot sample from an empty distribution");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (p < 0.0) {
      throw ValidationError("negative probability " + std::to_string(p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > tolerances().input) {
    throw ValidationError("probabilities sum to " + std::to_string(total) +
                          ", expected 1");
  }
  const double u = rng.uniform();
  // Cumulative inversion. u < cumulative keeps the lower index on exact
  // boundary hits, and a zero-probability entry can never be selected
  // because it leaves the cumulative sum unchanged.
  double cumulative = 0.0;
  for (std::size_t j = 0; j + 1 < probabilities.size(); ++j) {
    cumulative += probabilities[j];
    if (u < cumulative) return j;
  }
  return probabilities.size() - 1;
}

TrialOutcome sample_trajectory(
    const TwoStateVector& tsv,
    const std::optional<IntermediateMeasurement>& protocol, TrialRng& rng) {
  TrialOutcome outcome;
  StateVector state = tsv.pre();
  double from_time = tsv.t0();

  if (protocol.has_value()) {
    const IntermediateMeasurement& m = *protocol;
    state = evolve(tsv.hamiltonian(), m.t - from_time, state);
    from_time = m.t;

    std::vector<double> weights;
    weights.reserve(m.partition.size());
    for (const Operator& p : m.partition) {
      weights.push_back(apply(p, state).amplitudes().squaredNorm());
    }
    const std::size_t j = sample_categorical(weights, rng);
    outcome.intermediate_outcome = j;
    state = apply(m.partition[j], state).normalized();
  }

  state = evolve(tsv.hamiltonian(), tsv.t_f() - from_time, state);
  // Clamp away the +1 ulp excursions of |⟨post|state⟩|² above 1 so the
  // complementary weight stays nonnegative.
  const double p_success =
      std::min(1.0, std::norm(inner_product(tsv.post(), state)));
  const std::array<double, 2> final_weights{p_success, 1.0 - p_success};
  outcome.postselected = sample_categorical(final_weights, rng) == 0;
  return outcome;
}

EnsembleStats estimate_conditional(const TwoStateVector& tsv,
                                   std::span<const Operator> partition,
                                   double t, std::uint64_t trials,
                                   std::uint64_t seed, std::uint64_t stream) {
  require_enough_trials(trials);
  validate_partition(partition, tsv.dim());

  IntermediateMeasurement protocol;
  protocol.partition.assign(partition.begin(), partition.end());
  protocol.t = t;

  std::vector<std::uint64_t> counts(partition.size(), 0);
  std::uint64_t kept = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    TrialRng rng(seed, stream, i);
    const TrialOutcome outcome = sample_trajectory(tsv, protocol, rng);
    if (!outcome.postselected) continue;
    ++kept;
    ++counts[*outcome.intermediate_outcome];
  }
  if (kept == 0) {
    throw EmptyEnsembleError("no trial survived post-selection in " +
                             std::to_string(trials) +
                             " trials; conditional frequencies undefined");
  }

  EnsembleStats stats;
  stats.trials = trials;
  stats.postselected_count = kept;
  stats.conditioning_count = kept;
  stats.seed = seed;
  stats.conditional_frequencies.reserve(counts.size());
  stats.standard_errors.reserve(counts.size());
  for (std::uint64_t c : counts) {
    const double f = static_cast<double>(c) / static_cast<double>(kept);
    stats.conditional_frequencies.push_back(f);
    stats.standard_errors.push_back(binomial_error(f, kept));
  }
  return stats;
}

EnsembleStats estimate_postselection_rate(
    const TwoStateVector& tsv, std::uint64_t trials, std::uint64_t seed,
    const std::optional<IntermediateMeasurement>& protocol,
    const std::optional<ConditionedOn>& conditioned, std::uint64_t stream) {
  require_enough_trials(trials);
  if (protocol.has_value()) {
    validate_partition(protocol->partition, tsv.dim());
  }
  if (conditioned.has_value()) {
    if (!protocol.has_value()) {
      throw ValidationError(
          "conditioning on an intermediate outcome requires an intermediate "
          "measurement");
    }
    if (conditioned->outcome >= protocol->partition.size()) {
      throw ValidationError("conditioned outcome index " +
                            std::to_string(conditioned->outcome) +
                            " out of range for a partition of size " +
                            std::to_string(protocol->partition.size()));
    }
  }

  std::uint64_t in_denominator = 0;
  std::uint64_t postselected_total = 0;
  std::uint64_t successes = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    TrialRng rng(seed, stream, i);
    const TrialOutcome outcome = sample_trajectory(tsv, protocol, rng);
    if (outcome.postselected) ++postselected_total;
    if (conditioned.has_value() &&
        outcome.intermediate_outcome != conditioned->outcome) {
      continue;
    }
    ++in_denominator;
    if (outcome.postselected) ++successes;
  }
  if (in_denominator == 0) {
    throw EmptyEnsembleError(
        "no trial matched the conditioning outcome in " +
        std::to_string(trials) + " trials; rate undefined");
  }

  EnsembleStats stats;
  stats.trials = trials;
  stats.postselected_count = postselected_total;
  stats.conditioning_count = in_denominator;
  stats.seed = seed;
  const double f = static_cast<double>(successes) /
                   static_cast<double>(in_denominator);
  stats.conditional_frequencies = {f, 1.0 - f};
  const double se = binomial_error(f, in_denominator);
  stats.standard_errors = {se, se};
  return stats;
}

SampledChsh sample_chsh(const StateVector& state, const MeasurementSetting& a,
                        const MeasurementSetting& a_prime,
                        const MeasurementSetting& b,
                        const MeasurementSetting& b_prime,
                        std::uint64_t trials, std::uint64_t seed,
                        std::uint64_t stream_base) {
  require_enough_trials(trials);
  if (state.dim() != 4) {
    throw DimensionError("Bell sampling needs a two-qubit state, got "
                         "dimension " +
                         std::to_string(state.dim()));
  }
  const StateVector psi = state.normalized();
  const std::array<std::pair<MeasurementSetting, MeasurementSetting>, 4>
      pairs{{{a, b}, {a, b_prime}, {a_prime, b}, {a_prime, b_prime}}};

  SampledChsh sampled;
  sampled.trials = trials;
  sampled.seed = seed;
  double variance = 0.0;
  for (std::size_t pair_index = 0; pair_index < pairs.size(); ++pair_index) {
    // Joint ±1 outcome distribution of the commuting pair (â·σ)⊗1 and
    // 1⊗(b̂·σ): Born weights of the four sign branches.
    const Operator oa = observable(pairs[pair_index].first);
    const Operator ob = observable(pairs[pair_index].second);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);

    std::array<double, 4> weights{};  // (+,+), (+,−), (−,+), (−,−)
    for (int sa = 0; sa < 2; ++sa) {
      const double sign_a = sa == 0 ? 1.0 : -1.0;
      const Operator proj_a(0.5 * (id + sign_a * oa.entries()));
      for (int sb = 0; sb < 2; ++sb) {
        const double sign_b = sb == 0 ? 1.0 : -1.0;
        const Operator proj_b(0.5 * (id + sign_b * ob.entries()));
        weights[static_cast<std::size_t>(2 * sa + sb)] =
            apply(tensor(proj_a, proj_b), psi).amplitudes().squaredNorm();
      }
    }

    std::uint64_t agree = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      TrialRng rng(seed, stream_base + pair_index, i);
      const std::size_t branch = sample_categorical(weights, rng);
      if (branch == 0 || branch == 3) ++agree;  // products +1·+1, −1·−1
    }
    const double f = static_cast<double>(agree) / static_cast<double>(trials);
    // E = Pr(agree) − Pr(disagree) = 2f − 1, so SE(E) = 2·SE(f).
    sampled.correlators[pair_index] = 2.0 * f - 1.0;
    const double se = 2.0 * binomial_error(f, trials);
    sampled.correlator_errors[pair_index] = se;
    variance += se * se;
  }
  sampled.s = sampled.correlators[0] + sampled.correlators[1] +
              sampled.correlators[2] - sampled.correlators[3];
  sampled.std_error = std::sqrt(variance);
  return sampled;
}

}  // namespace tsvf
