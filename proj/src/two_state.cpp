#include "tsvflab/two_state.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

namespace {

constexpr double kEmptyEnsembleFloor = 1e-12;
constexpr double kNearOrthogonalFloor = 1e-6;

void require_inside_window(double t, double t0, double t_f) {
  if (t < t0 || t > t_f) {
    std::ostringstream msg;
    msg << "time " << t << " outside the selection window [" << t0 << ", "
        << t_f << "]";
    throw ValidationError(msg.str());
  }
}

}  // namespace

TwoStateVector::TwoStateVector(StateVector pre, StateVector post,
                               Operator hamiltonian, double t0, double t_f)
    : pre_(pre.normalized()),
      post_(post.normalized()),
      hamiltonian_(std::move(hamiltonian)),
      t0_(t0),
      t_f_(t_f) {
  if (pre_.dim() != post_.dim() || pre_.dim() != hamiltonian_.dim()) {
    throw DimensionError(
        "pre state, post state, and hamiltonian must share one dimension; "
        "got " +
        std::to_string(pre_.dim()) + ", " + std::to_string(post_.dim()) +
        ", " + std::to_string(hamiltonian_.dim()));
  }
  if (!(t0_ < t_f_)) {
    std::ostringstream msg;
    msg << "selection window must have t0 < t_f, got [" << t0_ << ", " << t_f_
        << "]";
    throw ValidationError(msg.str());
  }
  boundary_overlap_ =
      inner_product(post_, evolve(hamiltonian_, t_f_ - t0_, pre_));
  if (std::abs(boundary_overlap_) <= kEmptyEnsembleFloor) {
    throw EmptyEnsembleError(
        "pre and post selections never coincide: |<post|U|pre>| = " +
        std::to_string(std::abs(boundary_overlap_)) +
        "; the selected ensemble is empty");
  }
}

StateVector TwoStateVector::forward_state(double t) const {
  require_inside_window(t, t0_, t_f_);
  return evolve(hamiltonian_, t - t0_, pre_);
}

StateVector TwoStateVector::backward_state(double t) const {
  require_inside_window(t, t0_, t_f_);
  // U†(t_f − t)|post⟩ is evolution by a negated duration.
  return evolve(hamiltonian_, -(t_f_ - t), post_);
}

bool TwoStateVector::near_orthogonal() const {
  return std::abs(boundary_overlap_) < kNearOrthogonalFloor;
}

WeakValueResult weak_value(const TwoStateVector& tsv, const Operator& a,
                           double t) {
  if (a.dim() != tsv.dim()) {
    throw DimensionError("weak value operator dimension " +
                         std::to_string(a.dim()) +
                         " does not match system dimension " +
                         std::to_string(tsv.dim()));
  }
  const StateVector forward = tsv.forward_state(t);
  const StateVector backward = tsv.backward_state(t);
  const Complex numerator = inner_product(backward, apply(a, forward));
  const Complex denominator = inner_product(backward, forward);
  return WeakValueResult{numerator / denominator, a.name(), t};
}

void validate_partition(std::span<const Operator> partition,
                        Eigen::Index dim) {
  if (partition.empty()) {
    throw ValidationError("partition must contain at least one projector");
  }
  const double tol = tolerances().input;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const Operator& p = partition[j];
    if (p.dim() != dim) {
      throw ValidationError("partition element " + std::to_string(j) +
                            " has dimension " + std::to_string(p.dim()) +
                            ", expected " + std::to_string(dim));
    }
    if (!p.is_projector(tol)) {
      throw ValidationError("partition element " + std::to_string(j) + " ('" +
                            p.name() + "') is not a projector");
    }
    for (std::size_t k = j + 1; k < partition.size(); ++k) {
      const double cross =
          (p.entries() * partition[k].entries()).cwiseAbs().maxCoeff();
      if (cross > tol) {
        std::ostringstream msg;
        msg << "partition elements " << j << " and " << k
            << " overlap (max |Pi_j Pi_k| = " << cross << ")";
        throw ValidationError(msg.str());
      }
    }
    sum += p.entries();
  }
  const double defect =
      (sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (defect > tol) {
    std::ostringstream msg;
    msg << "partition does not resolve the identity (max deviation = "
        << defect << ")";
    throw ValidationError(msg.str());
  }
}

AblDistribution abl_probabilities(const TwoStateVector& tsv,
                                  std::span<const Operator> partition,
                                  double t) {
  validate_partition(partition, tsv.dim());
  const StateVector forward = tsv.forward_state(t);
  const StateVector backward = tsv.backward_state(t);

  AblDistribution dist;
  dist.outcome_labels.reserve(partition.size());
  dist.probabilities.reserve(partition.size());
  double total = 0.0;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const Complex amp =
        inner_product(backward, apply(partition[j], forward));
    const double weight = std::norm(amp);
    dist.outcome_labels.push_back(partition[j].name().empty()
                                      ? "outcome_" + std::to_string(j)
                                      : partition[j].name());
    dist.probabilities.push_back(weight);
    total += weight;
  }
  if (total <= 0.0) {
    throw ValidationError(
        "every outcome of this measurement is incompatible with the "
        "selections; conditional probabilities are undefined");
  }
  for (double& p : dist.probabilities) p /= total;
  return dist;
}

double postselection_probability(
    const TwoStateVector& tsv,
    const std::optional<IntermediateMeasurement>& intermediate) {
  if (!intermediate.has_value()) {
    return std::norm(tsv.boundary_overlap());
  }
  const IntermediateMeasurement& m = *intermediate;
  validate_partition(m.partition, tsv.dim());
  if (m.outcome >= m.partition.size()) {
    throw ValidationError("intermediate outcome index " +
                          std::to_string(m.outcome) +
                          " out of range for a partition of size " +
                          std::to_string(m.partition.size()));
  }
  const StateVector at_meas = tsv.forward_state(m.t);
  const StateVector collapsed = apply(m.partition[m.outcome], at_meas);
  const double branch_norm = collapsed.norm();
  const double branch_probability = branch_norm * branch_norm;
  if (branch_probability <= 0.0) {
    throw ValidationError(
        "selected intermediate outcome has zero probability at t = " +
        std::to_string(m.t));
  }
  const StateVector evolved =
      evolve(tsv.hamiltonian(), tsv.t_f() - m.t, collapsed.normalized());
  const double success = std::norm(inner_product(tsv.post(), evolved));
  return branch_probability * success;
}

bool strong_weak_correspondence(const TwoStateVector& tsv, const Operator& p,
                                double t) {
  const double tol = tolerances().input;
  if (!p.is_projector(tol)) {
    throw ValidationError("strong/weak correspondence is defined for "
                          "projectors; '" +
                          p.name() + "' is not one");
  }
  const Complex w = weak_value(tsv, p, t).value;
  const bool is_zero = std::abs(w) <= tol;
  const bool is_one = std::abs(w - Complex(1.0, 0.0)) <= tol;
  if (!is_zero && !is_one) return false;

  // When the weak value is extremal the projective outcome must be
  // certain; anything else is an internal inconsistency.
  const Eigen::MatrixXcd complement_entries =
      Eigen::MatrixXcd::Identity(tsv.dim(), tsv.dim()) - p.entries();
  const std::vector<Operator> dichotomy{
      p, Operator(complement_entries, {},
                  p.name().empty() ? "complement" : "not_" + p.name())};
  const AblDistribution dist = abl_probabilities(tsv, dichotomy, t);
  const double expected = is_one ? 1.0 : 0.0;
  if (std::abs(dist.probabilities[0] - expected) > tol) {
    throw std::logic_error(
        "extremal weak value did not yield a certain projective outcome");
  }
  return true;
}

PointerShift pointer_shift(const TwoStateVector& tsv, const Operator& a,
                           double t, double coupling, double pointer_width,
                           int grid) {
  if (a.dim() != tsv.dim()) {
    throw DimensionError("pointer measurement operator dimension " +
                         std::to_string(a.dim()) +
                         " does not match system dimension " +
                         std::to_string(tsv.dim()));
  }
  if (!(coupling > 0.0)) {
    throw ValidationError("pointer coupling must be positive");
  }
  if (!(pointer_width > 0.0)) {
    throw ValidationError("pointer width must be positive");
  }
  if (grid < 64) {
    throw ValidationError("pointer grid needs at least 64 points, got " +
                          std::to_string(grid));
  }
  if (!a.is_hermitian(tolerances().input)) {
    throw ValidationError("pointer measurement operator '" + a.name() +
                          "' is not hermitian");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.entries());
  if (solver.info() != Eigen::Success) {
    throw ValidationError("eigendecomposition of '" + a.name() + "' failed");
  }
  const Eigen::VectorXd eigenvalues = solver.eigenvalues();
  const double spectral_radius = eigenvalues.cwiseAbs().maxCoeff();

  // The grid must hold the initial packet (±8 widths ≈ 1e-28 tail mass)
  // plus the largest rigid translation any eigenvalue branch produces.
  const double half_width = 8.0 * pointer_width + coupling * spectral_radius;
  const double step = 2.0 * half_width / (grid - 1);
  if (step > pointer_width / 2.0) {
    const int needed =
        static_cast<int>(std::ceil(4.0 * half_width / pointer_width)) + 1;
    throw ValidationError(
        "pointer grid too coarse to resolve the packet: need at least " +
        std::to_string(needed) + " points for this width and coupling");
  }

  // Branch decomposition: the system part contributes, per eigenvalue a_k,
  // the complex weight c_k = ⟨post(t)|P_k|pre(t)⟩; the pointer packet on
  // that branch is the initial Gaussian displaced by coupling·a_k. The
  // conditional pointer state is Φ(x) = Σ_k c_k G(x − coupling·a_k).
  const StateVector forward = tsv.forward_state(t);
  const StateVector backward = tsv.backward_state(t);
  const Eigen::VectorXcd fwd_eig =
      solver.eigenvectors().adjoint() * forward.amplitudes();
  const Eigen::VectorXcd bwd_eig =
      solver.eigenvectors().adjoint() * backward.amplitudes();

  Eigen::VectorXcd branch_weight(a.dim());
  for (Eigen::Index k = 0; k < a.dim(); ++k) {
    branch_weight(k) = std::conj(bwd_eig(k)) * fwd_eig(k);
  }

  const double var = pointer_width * pointer_width;
  Eigen::VectorXcd packet = Eigen::VectorXcd::Zero(grid);
  for (int i = 0; i < grid; ++i) {
    const double x = -half_width + i * step;
    Complex amp(0.0, 0.0);
    for (Eigen::Index k = 0; k < a.dim(); ++k) {
      const double dx = x - coupling * eigenvalues(k);
      amp += branch_weight(k) * std::exp(-dx * dx / (4.0 * var));
    }
    packet(i) = amp;
  }

  const double norm2 = packet.squaredNorm() * step;
  if (norm2 <= 0.0) {
    throw ValidationError(
        "conditional pointer state vanished; the selections forbid every "
        "reading");
  }

  double mean_x = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = -half_width + i * step;
    mean_x += x * std::norm(packet(i)) * step;
  }
  mean_x /= norm2;

  // ⟨p⟩ = Im ∫ Φ* Φ' dx / ⟨Φ|Φ⟩, with Φ' by central differences (the
  // packet is smooth and the grid resolves it, so O(step²) suffices).
  double mean_p = 0.0;
  for (int i = 1; i + 1 < grid; ++i) {
    const Complex derivative = (packet(i + 1) - packet(i - 1)) / (2.0 * step);
    mean_p += std::imag(std::conj(packet(i)) * derivative) * step;
  }
  mean_p /= norm2;

  return PointerShift{mean_x, mean_p};
}

}  // namespace tsvf
