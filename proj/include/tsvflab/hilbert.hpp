#pragma once

#include <span>
#include <vector>

#include "tsvflab/operators.hpp"
#include "tsvflab/state.hpp"

namespace tsvf {

/// ⟨a|b⟩ with conjugation applied to `a`. Conjugate-symmetric:
/// inner_product(a, b) == conj(inner_product(b, a)).
Complex inner_product(const StateVector& a, const StateVector& b);

/// Kronecker products. Basis ordering is left-factor-major: the joint
/// index of (i, j) is i * b.dim() + j. This convention is normative for
/// every joint system built by the library; labels concatenate as
/// "left⊗right".
StateVector tensor(const StateVector& a, const StateVector& b);
Operator tensor(const Operator& a, const Operator& b);

/// Σ|s⟩⟨s| over the given states. Inputs must be mutually orthogonal
/// within tolerances().input (checked pairwise; the error names the
/// offending pair and its overlap). Each state is normalized before use
/// so the result is idempotent up to the input tolerance; the projector
/// flag is set when the entries verify it.
Operator projector(std::span<const StateVector> basis_states);
Operator projector(std::initializer_list<StateVector> basis_states);

/// Projector onto the span of the listed computational basis indices.
/// Named "Pi_<i...>" with 1-based indices unless a name is given.
Operator basis_projector(Eigen::Index dim, const std::vector<Eigen::Index>& indices,
                         std::string name = "");

/// exp(−i·H·duration)|v⟩ via the spectral decomposition of H. H must be
/// hermitian within tolerances().input. Norm is preserved within
/// tolerances().self.
StateVector evolve(const Operator& hamiltonian, double duration,
                   const StateVector& v);

/// Materialized propagator exp(−i·H·duration), unitary flag set.
Operator unitary_of(const Operator& hamiltonian, double duration);

/// Matrix action A|v⟩. The result is generally not normalized.
StateVector apply(const Operator& a, const StateVector& v);

/// Pauli-X restricted to span{|i⟩,|j⟩} and zero elsewhere: swaps the two
/// amplitudes, annihilates the rest. Hermitian; not unitary for dim > 2.
Operator exchange_operator(Eigen::Index dim, Eigen::Index i, Eigen::Index j);

}  // namespace tsvf
