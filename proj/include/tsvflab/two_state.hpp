#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsvflab/hilbert.hpp"

namespace tsvf {

/// A pre- and post-selected system: |ψ⟩ prepared at t0, |φ⟩ found at
/// t_f, evolving under a fixed hermitian hamiltonian in between. The
/// boundary states are stored normalized.
///
/// Construction rejects t0 ≥ t_f, and throws EmptyEnsembleError for
/// boundary pairs whose transition amplitude ⟨φ|U(t_f−t0)|ψ⟩ vanishes
/// (|·| ≤ 1e-12): no run would ever survive both selections. Pairs with
/// |⟨φ|U|ψ⟩| < 1e-6 are accepted but flagged near_orthogonal(), since
/// weak values then blow up; report builders attach a warning note.
class TwoStateVector {
 public:
  TwoStateVector(StateVector pre, StateVector post, Operator hamiltonian,
                 double t0, double t_f);

  const StateVector& pre() const { return pre_; }
  const StateVector& post() const { return post_; }
  const Operator& hamiltonian() const { return hamiltonian_; }
  double t0() const { return t0_; }
  double t_f() const { return t_f_; }
  Eigen::Index dim() const { return pre_.dim(); }

  /// U(t−t0)|ψ⟩, normalized. t must lie in [t0, t_f].
  StateVector forward_state(double t) const;

  /// U†(t_f−t)|φ⟩, normalized. t must lie in [t0, t_f].
  StateVector backward_state(double t) const;

  /// ⟨φ|U(t_f−t0)|ψ⟩. Equals ⟨backward_state(t)|forward_state(t)⟩ at
  /// every t.
  Complex boundary_overlap() const { return boundary_overlap_; }

  bool near_orthogonal() const;

 private:
  StateVector pre_;
  StateVector post_;
  Operator hamiltonian_;
  double t0_;
  double t_f_;
  Complex boundary_overlap_;
};

struct WeakValueResult {
  Complex value;
  std::string operator_name;
  double time = 0.0;
};

/// Outcome distribution of a projective measurement performed between
/// the two selections. Probabilities sum to 1 within tolerances().input.
struct AblDistribution {
  std::vector<std::string> outcome_labels;
  std::vector<double> probabilities;
};

/// The weak value ⟨φ(t)|A|ψ(t)⟩ / ⟨φ(t)|ψ(t)⟩. The denominator is
/// time-independent and nonzero by the TwoStateVector invariant. May be
/// complex and may lie outside the spectrum of A.
WeakValueResult weak_value(const TwoStateVector& tsv, const Operator& a,
                           double t);

/// Throws ValidationError unless the operators form a complete orthogonal
/// projector partition of the dim-dimensional identity, naming the defect.
void validate_partition(std::span<const Operator> partition, Eigen::Index dim);

/// Conditional outcome probabilities for a projective measurement of the
/// given partition at time t:
///   Pr(j) = |⟨φ(t)|Π_j|ψ(t)⟩|² / Σ_k |⟨φ(t)|Π_k|ψ(t)⟩|².
/// Degenerate (rank > 1) projectors are supported as written.
AblDistribution abl_probabilities(const TwoStateVector& tsv,
                                  std::span<const Operator> partition,
                                  double t);

/// One projective measurement inserted at time t, keeping outcome
/// `outcome` of `partition`.
struct IntermediateMeasurement {
  std::vector<Operator> partition;
  std::size_t outcome = 0;
  double t = 0.0;
};

/// Probability that the final strong measurement yields |φ⟩. With no
/// intermediate measurement this is |⟨φ|U(t_f−t0)|ψ⟩|²; with one, the
/// Born probability computed from the collapsed, renormalized, further
/// evolved state. The chosen outcome must have nonzero Born probability
/// at its time.
double postselection_probability(
    const TwoStateVector& tsv,
    const std::optional<IntermediateMeasurement>& intermediate = {});

/// True iff the weak value of projector `p` equals 0 or 1 within
/// tolerances().input — the cases where the same answer would come from a
/// strong measurement. When true, the dichotomic ABL distribution
/// {p, I−p} is checked internally to be (0,1) or (1,0); a mismatch is a
/// defect and throws std::logic_error.
bool strong_weak_correspondence(const TwoStateVector& tsv, const Operator& p,
                                double t);

struct PointerShift {
  double position_shift = 0.0;
  double momentum_shift = 0.0;
};

/// Exact conditional pointer readings for a von Neumann measurement of A
/// at time t, post-selected on |φ⟩.
///
/// The pointer is a Gaussian wavepacket G(x) ∝ exp(−x²/(4w²)) with
/// w = pointer_width (position variance w², momentum variance 1/(4w²)),
/// discretized on a symmetric grid of `grid` points spanning half-width
/// 8w + coupling·max|eig(A)| (the extension keeps any rigidly translated
/// packet on the grid, so A = identity reads position_shift = coupling at
/// every coupling). The impulsive interaction exp(−i·coupling·A⊗p̂)
/// translates the pointer by coupling·a on each eigenvalue-a branch.
///
/// Weak limit (coupling ≪ w):
///   position_shift → coupling·Re(A_w)
///   momentum_shift → coupling·Im(A_w)·2·Var(p) = coupling·Im(A_w)/(2w²)
/// with corrections of order (coupling/w)².
///
/// Requires coupling > 0, pointer_width > 0, grid ≥ 64, and a grid step
/// no coarser than w/2 (else the pointer is unresolved and a
/// ValidationError names the required minimum).
PointerShift pointer_shift(const TwoStateVector& tsv, const Operator& a,
                           double t, double coupling, double pointer_width,
                           int grid);

}  // namespace tsvf
