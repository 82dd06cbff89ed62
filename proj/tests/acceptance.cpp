// Acceptance gate: one check per headline behaviour of the library, each
// printed as a single PASS/FAIL line. The binary exits nonzero if any
// criterion fails, so CI can gate on it directly.
//
// Every expected number here is either a closed form stated in the code
// (with its derivation) or a recorded golden from an independent hand
// calculation; nothing is read back from the implementation under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tsvflab/bell.hpp"
#include "tsvflab/errors.hpp"
#include "tsvflab/experiments.hpp"
#include "tsvflab/hilbert.hpp"
#include "tsvflab/montecarlo.hpp"
#include "tsvflab/operators.hpp"
#include "tsvflab/state.hpp"
#include "tsvflab/two_state.hpp"

namespace {

using tsvf::Complex;
using tsvf::Operator;
using tsvf::StateVector;
using tsvf::TwoStateVector;

constexpr double kPi = std::numbers::pi;
const double kRootHalf = 1.0 / std::numbers::sqrt2;
const double kTsirelson = 2.0 * std::numbers::sqrt2;

/// Collects the sub-checks of one criterion; the criterion passes only if
/// every sub-check held.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }

  void require_close(double got, double want, double tol,
                     const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream text;
      text.precision(17);
      text << what << " (got " << got << ", want " << want << " within "
           << tol << ")";
      failures_.push_back(text.str());
    }
  }

  void require_close(Complex got, Complex want, double tol,
                     const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream text;
      text.precision(17);
      text << what << " (got " << got.real() << "+" << got.imag()
           << "i, want " << want.real() << "+" << want.imag() << "i within "
           << tol << ")";
      failures_.push_back(text.str());
    }
  }

  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

int g_failed_criteria = 0;

void run_criterion(int number, const std::string& title,
                   const std::function<void(Checker&)>& body) {
  Checker check;
  std::string aborted;
  try {
    body(check);
  } catch (const std::exception& e) {
    aborted = std::string("unexpected exception: ") + e.what();
  }

  if (aborted.empty() && check.ok()) {
    std::cout << "PASS criterion " << number << ": " << title << "\n";
    return;
  }
  ++g_failed_criteria;
  std::cout << "FAIL criterion " << number << ": " << title;
  if (!aborted.empty()) {
    std::cout << " — " << aborted;
  } else {
    std::cout << " — " << check.failures().front();
    if (check.failures().size() > 1) {
      std::cout << " (+" << check.failures().size() - 1 << " more)";
    }
  }
  std::cout << "\n";
}

/// Particle prepared across three boxes and found in an orthogonal-ish
/// superposition, with nothing happening in between.
TwoStateVector boxed_particle() {
  const double s = 1.0 / std::sqrt(3.0);
  return TwoStateVector(StateVector(Eigen::Vector3cd(s, s, s)),
                        StateVector(Eigen::Vector3cd(s, s, -s)),
                        Operator::zero(3), 0.0, 1.0);
}

/// The same three boxes with amplitude cycling between boxes 1 and 2 over
/// a half turn, selected so the local occupations fade and return.
TwoStateVector cycling_particle() {
  const double s = 1.0 / std::sqrt(3.0);
  const Complex i(0.0, 1.0);
  return TwoStateVector(StateVector(Eigen::Vector3cd(s, i * s, s)),
                        StateVector(Eigen::Vector3cd(-s, i * s, s)),
                        tsvf::exchange_operator(3, 0, 1), 0.0, kPi);
}

Operator box(int k) { return tsvf::basis_projector(3, {k}); }

/// "Is it in box k?" as a yes/no question: {Π_k, 1 − Π_k}.
std::vector<Operator> box_question(int k) {
  std::vector<Eigen::Index> rest;
  for (Eigen::Index j = 0; j < 3; ++j) {
    if (j != k) rest.push_back(j);
  }
  return {tsvf::basis_projector(3, {static_cast<Eigen::Index>(k)}),
          tsvf::basis_projector(3, rest)};
}

std::vector<Operator> box_triple() { return {box(0), box(1), box(2)}; }

void criterion_1(Checker& check) {
  const TwoStateVector tsv = boxed_particle();

  // Opening box 1 finds the particle with certainty; so does opening
  // box 2. Both facts hold at every intermediate time (nothing evolves),
  // so one representative time suffices.
  for (int k : {0, 1}) {
    const auto dist = abl_probabilities(tsv, box_question(k), 0.5);
    check.require_close(dist.probabilities[0], 1.0, 1e-12,
                        "certain occupation of box " + std::to_string(k + 1));
  }

  // The sampled counterpart is not merely close: the losing outcome has
  // weight exactly zero, and the sampler never draws a zero-weight
  // branch, so 1e5 trials must give frequency exactly 1.
  for (int k : {0, 1}) {
    const auto stats =
        tsvf::estimate_conditional(tsv, box_question(k), 0.5, 100000, 11);
    check.require(stats.conditional_frequencies[0] == 1.0 &&
                      stats.conditional_frequencies[1] == 0.0,
                  "sampled frequency for box " + std::to_string(k + 1) +
                      " is exactly 1");
  }
}

void criterion_2(Checker& check) {
  const TwoStateVector tsv = boxed_particle();
  const Complex w1 = weak_value(tsv, box(0), 0.5).value;
  const Complex w2 = weak_value(tsv, box(1), 0.5).value;
  const Complex w3 = weak_value(tsv, box(2), 0.5).value;

  // Both certainties force occupation 1, yet the three occupations must
  // sum to one particle — box 3 absorbs the excess with weight −1.
  check.require_close(w3, Complex(-1.0, 0.0), 1e-12,
                      "anomalous occupation of box 3");
  check.require_close(w1 + w2 + w3, Complex(1.0, 0.0), 1e-12,
                      "occupations sum to one particle");
}

void criterion_3(Checker& check) {
  const TwoStateVector tsv = cycling_particle();

  // Certainty pattern of strong looks at the three probe times: an entry
  // of 1 or 0 is forced; dots in the pattern are unconstrained.
  struct PatternRow {
    double t;
    double expected[3];  // NaN marks an unconstrained entry
  };
  const double dot = std::numeric_limits<double>::quiet_NaN();
  const PatternRow rows[] = {
      {0.0, {1.0, dot, 1.0}},
      {kPi / 4.0, {0.0, 0.0, 1.0}},
      {kPi / 2.0, {dot, 1.0, 1.0}},
  };
  for (const PatternRow& row : rows) {
    for (int k = 0; k < 3; ++k) {
      if (std::isnan(row.expected[k])) continue;
      const auto dist = abl_probabilities(tsv, box_question(k), row.t);
      std::ostringstream what;
      what << "found-in-box-" << k + 1 << " probability at t=" << row.t;
      check.require_close(dist.probabilities[0], row.expected[k], 1e-12,
                          what.str());
    }
  }

  // Weakly probed, the occupations trace cos 2t, −cos 2t, 1 across the
  // whole first quarter of the cycle.
  for (int j = 0; j < 100; ++j) {
    const double t = (kPi / 2.0) * j / 99.0;
    const Complex w1 = weak_value(tsv, box(0), t).value;
    const Complex w2 = weak_value(tsv, box(1), t).value;
    const Complex w3 = weak_value(tsv, box(2), t).value;
    const bool row_ok = std::abs(w1 - Complex(std::cos(2 * t), 0)) <= 1e-10 &&
                        std::abs(w2 + Complex(std::cos(2 * t), 0)) <= 1e-10 &&
                        std::abs(w3 - Complex(1.0, 0)) <= 1e-10;
    std::ostringstream what;
    what << "weak occupation triple at sweep point t=" << t;
    check.require(row_ok, what.str());
    if (!row_ok) break;
  }
}

void criterion_4(Checker& check) {
  const TwoStateVector tsv = cycling_particle();

  // Unconditioned, the final selection succeeds |⟨φ|U|ψ⟩|² = 1/9 of the
  // time: the "11%".
  check.require_close(postselection_probability(tsv), 1.0 / 9.0, 1e-12,
                      "bare selection rate");

  const auto plain = tsvf::estimate_postselection_rate(tsv, 1000000, 21);
  const double se = std::max(plain.standard_errors[0], 1e-9);
  check.require_close(plain.conditional_frequencies[0], 1.0 / 9.0, 4.0 * se,
                      "sampled bare selection rate within 4 standard errors");

  // Condition on actually finding the particle in box 1 at t = 0 and the
  // rate triples to 1/3: the "33%". Analytic path: joint probability of
  // (outcome, selection) divided by the outcome's own weight.
  tsvf::IntermediateMeasurement found_in_box_1{box_triple(), 0, 0.0};
  const double joint = postselection_probability(tsv, found_in_box_1);
  const StateVector at_zero = tsv.forward_state(0.0);
  const double branch =
      apply(box(0), at_zero).amplitudes().squaredNorm();
  check.require_close(joint / branch, 1.0 / 3.0, 1e-12,
                      "conditioned selection rate, analytic");

  // Sampled path: same conditioning inside the trajectory sampler.
  const auto conditioned = tsvf::estimate_postselection_rate(
      tsv, 200000, 22, found_in_box_1, tsvf::ConditionedOn{0});
  const double cse = std::max(conditioned.standard_errors[0], 1e-9);
  check.require_close(conditioned.conditional_frequencies[0], 1.0 / 3.0,
                      4.0 * cse,
                      "conditioned selection rate within 4 standard errors");
}

void criterion_5(Checker& check) {
  // One probe split across boxes 1 and 2 of the frozen arena. Both parts
  // see an occupied box (weak occupations +1), reflect, and recombine.
  const auto run = tsvf::simulate_combination(
      tsvf::static_shutter_arena(), tsvf::PathCombination::parse("t1:1,2"));

  check.require(run.conditional_photon.has_value(),
                "conditional photon state exists");
  if (run.conditional_photon.has_value()) {
    const StateVector& photon = *run.conditional_photon;
    double off_support = 0.0;
    Complex r1(0, 0);
    Complex r2(0, 0);
    for (Eigen::Index i = 0; i < photon.dim(); ++i) {
      const std::string label = photon.label(i);
      if (label == "r(t1,1)") {
        r1 = photon.amplitude(i);
      } else if (label == "r(t1,2)") {
        r2 = photon.amplitude(i);
      } else {
        off_support = std::max(off_support, std::abs(photon.amplitude(i)));
      }
    }
    check.require_close(r1, Complex(kRootHalf, 0.0), 1e-12,
                        "reflected amplitude on box 1");
    check.require_close(r2, Complex(kRootHalf, 0.0), 1e-12,
                        "reflected amplitude on box 2");
    check.require(off_support < 1e-12,
                  "no amplitude outside the two reflected modes");
  }

  check.require(std::sqrt(run.transmitted_fraction) < 1e-12,
                "transmitted norm below 1e-12");
  check.require_close(run.selection_rate, 1.0 / 9.0, 1e-12,
                      "selection rate 1/9");
}

void criterion_6(Checker& check) {
  // The box-hopping split: every probe part meets a box that is occupied
  // with certainty at its own probe time, so the probe recombines
  // perfectly even though no single box blocks all three slots.
  const tsvf::ExperimentReport headline = tsvf::temporal_shutter();
  check.require_close(headline.scalars.at("fidelity"), 1.0, 1e-9,
                      "recombined fidelity of the certain combination");
  check.require(headline.scalars.at("transmitted_fraction") < 1e-12,
                "nothing crosses under the certain combination");

  // Swapping a single box assignment breaks a certainty and the probe
  // leaks. The two recorded goldens come from the hand-computed mode
  // table: fidelity 4/15 (rate 5/27) and 4/9 (rate 1/9).
  struct Golden {
    const char* combo;
    double fidelity;
  };
  const Golden perturbed[] = {
      {"t1:1,2;t2:3;t3:2,3", 4.0 / 15.0},
      {"t1:1,3;t2:2;t3:2,3", 4.0 / 9.0},
  };
  for (const Golden& g : perturbed) {
    const auto report =
        tsvf::temporal_shutter(tsvf::PathCombination::parse(g.combo));
    const double fidelity = report.scalars.at("fidelity");
    check.require(fidelity < 1.0 - 1e-3,
                  std::string("perturbed combination ") + g.combo +
                      " leaks visibly");
    check.require_close(fidelity, g.fidelity, 1e-12,
                        std::string("golden fidelity of ") + g.combo);
  }
}

void criterion_7(Checker& check) {
  const tsvf::ShutterProbeSystem arena = tsvf::cycling_shutter_arena();

  // Boxes 1 and 2 are both certainly empty at the middle probe time, so
  // a probe split across them crosses untouched and recombines.
  const auto through = tsvf::simulate_combination(
      arena, tsvf::PathCombination::parse("t2:1,2"));
  check.require(through.transmission_fidelity.has_value(),
                "transmission fidelity defined for the empty pair");
  if (through.transmission_fidelity.has_value()) {
    check.require_close(*through.transmission_fidelity, 1.0, 1e-9,
                        "transmitted probe recombines perfectly");
  }

  // Box 3 is certainly occupied at that time: nothing crosses at all.
  const auto blocked = tsvf::simulate_combination(
      arena, tsvf::PathCombination::parse("t2:3"));
  double worst = std::sqrt(blocked.transmitted_fraction);
  for (const tsvf::ModeAmplitudeRow& row : blocked.modes) {
    worst = std::max(worst, std::abs(row.transmitted));
  }
  check.require(worst < 1e-12, "transmitted amplitude through box 3");
}

void criterion_8(Checker& check) {
  // Two interferometers whose would-collide branches are discarded leave
  // the correlated path pair (|1⟩|1⟩ + |2⟩|2⟩)/√2 half the time.
  const tsvf::ExperimentReport report = tsvf::crossed_interferometers();
  check.require(report.conditional_state.has_value(), "pair state exists");
  if (report.conditional_state.has_value()) {
    const StateVector& pair = *report.conditional_state;
    const bool shape_ok =
        pair.dim() == 4 &&
        std::abs(pair.amplitude(0) - Complex(kRootHalf, 0)) <= 1e-10 &&
        std::abs(pair.amplitude(1)) <= 1e-10 &&
        std::abs(pair.amplitude(2)) <= 1e-10 &&
        std::abs(pair.amplitude(3) - Complex(kRootHalf, 0)) <= 1e-10;
    check.require(shape_ok, "kept state is the correlated path pair");
  }
  check.require_close(report.scalars.at("discard_rate"), 0.5, 1e-12,
                      "half the runs are discarded");
  check.require_close(std::abs(report.scalars.at("chsh_s")), kTsirelson, 1e-6,
                      "optimized Bell score of the kept pair");

  // Property: no two-qubit state, however prepared or measured, beats the
  // quantum ceiling 2√2.
  std::mt19937_64 rng = tsvf_test::seeded_rng(0xACCE11ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto random_setting = [&]() {
    return tsvf::MeasurementSetting{std::acos(2.0 * unit(rng) - 1.0),
                                    2.0 * kPi * unit(rng)};
  };
  bool bounded = true;
  for (int i = 0; i < 10000 && bounded; ++i) {
    const StateVector state = tsvf_test::random_state(rng, 4);
    const auto result = tsvf::chsh(state, random_setting(), random_setting(),
                                   random_setting(), random_setting());
    bounded = std::abs(result.s) <= kTsirelson + 1e-9;
  }
  check.require(bounded, "quantum ceiling respected by 10^4 random states");
}

void criterion_9(Checker& check) {
  // Symmetric emission leaves the two atoms maximally entangled even
  // though they were never both excited.
  const tsvf::ExperimentReport symmetric = tsvf::quantum_liar();
  check.require(symmetric.conditional_state.has_value(), "pair state exists");
  if (symmetric.conditional_state.has_value()) {
    const StateVector& pair = *symmetric.conditional_state;
    const bool shape_ok =
        pair.dim() == 4 && std::abs(pair.amplitude(0)) <= 1e-12 &&
        std::abs(pair.amplitude(1) - Complex(kRootHalf, 0)) <= 1e-12 &&
        std::abs(pair.amplitude(2) - Complex(kRootHalf, 0)) <= 1e-12 &&
        std::abs(pair.amplitude(3)) <= 1e-12;
    check.require(shape_ok,
                  "kept state is the balanced one-excitation pair");
  }
  check.require_close(std::abs(symmetric.scalars.at("chsh_s")), kTsirelson,
                      1e-6, "optimized Bell score at balanced emission");

  // As the emission amplitude vanishes the pair factorizes and the Bell
  // score falls to the classical ceiling.
  const tsvf::ExperimentReport faint = tsvf::quantum_liar(1e-4);
  check.require(std::abs(faint.scalars.at("chsh_s")) <= 2.0 + 1e-6,
                "faint emission is classically bounded");
  const tsvf::ExperimentReport skewed = tsvf::quantum_liar(0.3);
  check.require(std::abs(skewed.scalars.at("chsh_s")) <
                    std::abs(symmetric.scalars.at("chsh_s")),
                "skewed emission scores below balanced emission");
}

void criterion_10(Checker& check) {
  // Sampled conditional frequencies must agree with the closed-form
  // conditional distribution on randomized instances. One excursion past
  // five standard errors among 50 instances is statistically tolerable;
  // two are not.
  std::mt19937_64 rng = tsvf_test::seeded_rng(0x0DDBA11ULL);
  int agreeing = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const Eigen::Index dim = 2 + instance % 3;

    TwoStateVector tsv = [&]() {
      while (true) {
        try {
          StateVector pre = tsvf_test::random_state(rng, dim);
          StateVector post = tsvf_test::random_state(rng, dim);
          Operator h =
              Operator::hermitian(tsvf_test::random_hermitian_entries(rng, dim));
          TwoStateVector candidate(pre, post, h, 0.0, 1.0);
          if (postselection_probability(candidate) >= 0.01) return candidate;
        } catch (const tsvf::EmptyEnsembleError&) {
        }
      }
    }();

    std::vector<Operator> partition;
    for (Eigen::Index k = 0; k < dim; ++k) {
      partition.push_back(tsvf::basis_projector(dim, {k}));
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double t = unit(rng);

    const auto exact = abl_probabilities(tsv, partition, t);
    const auto sampled = tsvf::estimate_conditional(
        tsv, partition, t, 2000, 6000 + static_cast<std::uint64_t>(instance));

    bool instance_ok = sampled.conditioning_count > 0;
    for (std::size_t k = 0; k < partition.size() && instance_ok; ++k) {
      const double p = exact.probabilities[k];
      const double se = std::sqrt(
          p * (1.0 - p) / static_cast<double>(sampled.conditioning_count));
      instance_ok = std::abs(sampled.conditional_frequencies[k] - p) <=
                    5.0 * se + 1e-12;
    }
    if (instance_ok) ++agreeing;
  }
  check.require(agreeing >= 49,
                "sampled and exact conditionals agree in at least 49/50 "
                "instances (got " +
                    std::to_string(agreeing) + ")");

  // Determinism: the same seed replays the identical ensemble.
  const TwoStateVector tsv = boxed_particle();
  const auto first =
      tsvf::estimate_conditional(tsv, box_triple(), 0.5, 5000, 99);
  const auto second =
      tsvf::estimate_conditional(tsv, box_triple(), 0.5, 5000, 99);
  check.require(first.conditional_frequencies == second.conditional_frequencies &&
                    first.standard_errors == second.standard_errors &&
                    first.postselected_count == second.postselected_count,
                "bit-identical rerun under a fixed seed");
}

void criterion_11(Checker& check) {
  // A gently coupled Gaussian pointer reads the weak value: the mean
  // position shift per unit coupling converges to Re A_w (and the
  // momentum shift to g·Im A_w / 2w²) with an O(g²) error, so halving g
  // shrinks the error about fourfold.
  const double couplings[] = {0.04, 0.02, 0.01};
  const int grid = 1024;
  const double width = 1.0;

  // Box 3 of the frozen arena: A_w = −1, purely real.
  {
    const TwoStateVector tsv = boxed_particle();
    double err[3];
    for (int i = 0; i < 3; ++i) {
      const auto shift =
          pointer_shift(tsv, box(2), 0.5, couplings[i], width, grid);
      err[i] = std::abs(shift.position_shift / couplings[i] - (-1.0));
    }
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    check.require(r1 > 2.0 && r1 < 8.0 && r2 > 2.0 && r2 < 8.0,
                  "quadratic convergence of the box-3 position reading");
  }

  // The box-1/box-2 exchange in the cycling arena: A_w = 2i, purely
  // imaginary, so the position reading stays at zero and the imaginary
  // part surfaces as a momentum kick.
  {
    const TwoStateVector tsv = cycling_particle();
    const Operator swap = tsvf::exchange_operator(3, 0, 1);
    const auto sub_floor =
        pointer_shift(tsv, swap, kPi / 4.0, couplings[0], width, grid);
    check.require(std::abs(sub_floor.position_shift) < 1e-9,
                  "no position reading for a purely imaginary weak value");

    const double target = 2.0 / (2.0 * width * width);  // Im A_w / 2w²
    double err[3];
    for (int i = 0; i < 3; ++i) {
      const auto shift =
          pointer_shift(tsv, swap, kPi / 4.0, couplings[i], width, grid);
      err[i] = std::abs(shift.momentum_shift / couplings[i] - target);
    }
    const double r1 = err[0] / err[1];
    const double r2 = err[1] / err[2];
    check.require(r1 > 2.0 && r1 < 8.0 && r2 > 2.0 && r2 < 8.0,
                  "quadratic convergence of the exchange momentum reading");
  }
}

}  // namespace

int main() {
  run_criterion(1, "opened boxes are certainly occupied, analytically and "
                   "in a sampled ensemble", criterion_1);
  run_criterion(2, "box 3 carries weak occupation −1 and the occupations "
                   "sum to one particle", criterion_2);
  run_criterion(3, "the cycling particle's certainty pattern and weak "
                   "occupations follow cos 2t", criterion_3);
  run_criterion(4, "conditioning on the box-1 finding lifts the selection "
                   "rate from 1/9 to 1/3", criterion_4);
  run_criterion(5, "the split probe reflects off both boxes and recombines "
                   "with nothing transmitted", criterion_5);
  run_criterion(6, "the box-hopping combination reflects perfectly while "
                   "perturbed ones leak", criterion_6);
  run_criterion(7, "probes aimed at certainly-empty boxes cross untouched; "
                   "the occupied box blocks all", criterion_7);
  run_criterion(8, "crossed interferometers leave a Bell-maximal pair and "
                   "no state beats 2√2", criterion_8);
  run_criterion(9, "balanced emission entangles the never-both-excited "
                   "atoms to the quantum ceiling", criterion_9);
  run_criterion(10, "sampled conditionals match closed forms on 50 random "
                    "instances, reproducibly", criterion_10);
  run_criterion(11, "gaussian pointer readings converge quadratically to "
                    "the weak value", criterion_11);

  if (g_failed_criteria > 0) {
    std::cout << g_failed_criteria << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 11 criteria passed\n";
  return 0;
}
