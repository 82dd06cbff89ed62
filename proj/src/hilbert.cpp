#include "tsvflab/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <sstream>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimensions " +
                         std::to_string(a) + " and " + std::to_string(b) +
                         " do not match");
  }
}

}  // namespace

Complex inner_product(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner product");
  return a.amplitudes().dot(b.amplitudes());
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Eigen::VectorXcd joint(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    joint.segment(i * b.dim(), b.dim()) = a.amplitude(i) * b.amplitudes();
  }
  std::vector<std::string> labels;
  if (a.has_labels() || b.has_labels()) {
    labels.reserve(static_cast<std::size_t>(a.dim() * b.dim()));
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
      for (Eigen::Index j = 0; j < b.dim(); ++j) {
        labels.push_back(a.label(i) + "⊗" + b.label(j));
      }
    }
  }
  return StateVector(std::move(joint), std::move(labels));
}

Operator tensor(const Operator& a, const Operator& b) {
  const Eigen::Index da = a.dim();
  const Eigen::Index db = b.dim();
  Eigen::MatrixXcd joint(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      joint.block(i * db, j * db, db, db) = a.entries()(i, j) * b.entries();
    }
  }
  OpStructure structure{
      .hermitian = a.structure().hermitian && b.structure().hermitian,
      .unitary = a.structure().unitary && b.structure().unitary,
      .projector = a.structure().projector && b.structure().projector,
  };
  std::string name;
  if (!a.name().empty() || !b.name().empty()) {
    name = (a.name().empty() ? "?" : a.name()) + "⊗" +
           (b.name().empty() ? "?" : b.name());
  }
  return Operator(std::move(joint), structure, std::move(name));
}

Operator projector(std::span<const StateVector> basis_states) {
  if (basis_states.empty()) {
    throw ValidationError("projector needs at least one state");
  }
  const Eigen::Index dim = basis_states.front().dim();
  std::vector<StateVector> unit;
  unit.reserve(basis_states.size());
  for (const StateVector& s : basis_states) {
    require_same_dim(dim, s.dim(), "projector");
    unit.push_back(s.normalized());
  }
  const double tol = tolerances().input;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    for (std::size_t j = i + 1; j < unit.size(); ++j) {
      const double overlap = std::abs(inner_product(unit[i], unit[j]));
      if (overlap > tol) {
        std::ostringstream msg;
        msg << "projector states " << i << " and " << j
            << " are not orthogonal (|overlap| = " << overlap << ")";
        throw ValidationError(msg.str());
      }
    }
  }
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (const StateVector& s : unit) {
    p += s.amplitudes() * s.amplitudes().adjoint();
  }
  // Inputs are orthogonal only within tolerance, so the projector flag is
  // set from the actual entries rather than asserted.
  Operator candidate(std::move(p), {.hermitian = true});
  if (candidate.is_projector(tolerances().self)) {
    return Operator(candidate.entries(),
                    {.hermitian = true, .unitary = false, .projector = true});
  }
  return candidate;
}

Operator projector(std::initializer_list<StateVector> basis_states) {
  std::vector<StateVector> states(basis_states);
  return projector(std::span<const StateVector>(states));
}

Operator basis_projector(Eigen::Index dim,
                         const std::vector<Eigen::Index>& indices,
                         std::string name) {
  if (indices.empty()) {
    throw ValidationError("basis projector needs at least one index");
  }
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  std::string default_name = "Pi";
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= dim) {
      throw DimensionError("basis projector index " + std::to_string(i) +
                           " out of range for dimension " +
                           std::to_string(dim));
    }
    if (p(i, i).real() != 0.0) {
      throw ValidationError("basis projector index " + std::to_string(i) +
                            " repeated");
    }
    p(i, i) = Complex(1.0, 0.0);
    default_name += "_" + std::to_string(i + 1);
  }
  return Operator(std::move(p),
                  {.hermitian = true, .unitary = false, .projector = true},
                  name.empty() ? default_name : std::move(name));
}

namespace {

/// Spectral decomposition of a (validated) hermitian operator, shared by
/// evolve and unitary_of.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigensystem(
    const Operator& hamiltonian) {
  if (!hamiltonian.is_hermitian(tolerances().input)) {
    throw ValidationError("hamiltonian '" + hamiltonian.name() +
                          "' is not hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      hamiltonian.entries());
  if (solver.info() != Eigen::Success) {
    throw ValidationError("eigendecomposition of hamiltonian '" +
                          hamiltonian.name() + "' failed");
  }
  return solver;
}

}  // namespace

StateVector evolve(const Operator& hamiltonian, double duration,
                   const StateVector& v) {
  require_same_dim(hamiltonian.dim(), v.dim(), "evolve");
  // exp(−iH·0) and exp(−i0·t) are the identity; returning the input
  // unchanged keeps amplitudes bit-exact through trivial evolutions.
  if (duration == 0.0 || hamiltonian.entries().isZero(0.0)) {
    if (!hamiltonian.is_hermitian(tolerances().input)) {
      throw ValidationError("hamiltonian '" + hamiltonian.name() +
                            "' is not hermitian");
    }
    return v;
  }
  const auto solver = eigensystem(hamiltonian);
  const Eigen::VectorXcd in_eigenbasis =
      solver.eigenvectors().adjoint() * v.amplitudes();
  Eigen::VectorXcd phased(v.dim());
  for (Eigen::Index k = 0; k < v.dim(); ++k) {
    const double angle = -solver.eigenvalues()(k) * duration;
    phased(k) = std::polar(1.0, angle) * in_eigenbasis(k);
  }
  return StateVector(solver.eigenvectors() * phased, v.labels());
}

Operator unitary_of(const Operator& hamiltonian, double duration) {
  if (duration == 0.0 || hamiltonian.entries().isZero(0.0)) {
    if (!hamiltonian.is_hermitian(tolerances().input)) {
      throw ValidationError("hamiltonian '" + hamiltonian.name() +
                            "' is not hermitian");
    }
    return Operator::identity(hamiltonian.dim());
  }
  const auto solver = eigensystem(hamiltonian);
  Eigen::VectorXcd phases(hamiltonian.dim());
  for (Eigen::Index k = 0; k < hamiltonian.dim(); ++k) {
    phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * duration);
  }
  Eigen::MatrixXcd u = solver.eigenvectors() * phases.asDiagonal() *
                       solver.eigenvectors().adjoint();
  return Operator(std::move(u), {.unitary = true});
}

StateVector apply(const Operator& a, const StateVector& v) {
  require_same_dim(a.dim(), v.dim(), "apply");
  return StateVector(a.entries() * v.amplitudes(), v.labels());
}

Operator exchange_operator(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  if (i < 0 || i >= dim || j < 0 || j >= dim) {
    throw DimensionError("exchange indices out of range for dimension " +
                         std::to_string(dim));
  }
  if (i == j) {
    throw ValidationError("exchange indices must differ");
  }
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
  x(i, j) = Complex(1.0, 0.0);
  x(j, i) = Complex(1.0, 0.0);
  return Operator(std::move(x), {.hermitian = true});
}

}  // namespace tsvf
