#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace tsvf {

using Complex = std::complex<double>;

/// A pure state over a labeled finite basis, stored as a dense complex
/// amplitude vector. Values are immutable after construction; every
/// operation returns a new StateVector.
///
/// A StateVector is not forced to unit norm (projections and conditional
/// states are naturally sub-normalized); normalized() returns a unit
/// copy and norm() reports the current length.
class StateVector {
 public:
  explicit StateVector(Eigen::VectorXcd amplitudes,
                       std::vector<std::string> labels = {});

  /// Basis vector |index> of the given dimension.
  static StateVector basis(Eigen::Index dim, Eigen::Index index,
                           std::vector<std::string> labels = {});

  Eigen::Index dim() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex amplitude(Eigen::Index i) const { return amplitudes_(i); }

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Label of basis index i, or its decimal index when unlabeled.
  std::string label(Eigen::Index i) const;

  double norm() const { return amplitudes_.norm(); }

  /// Unit-norm copy. The result satisfies |Σ|a|² − 1| ≤ tolerances().self.
  StateVector normalized() const;

  StateVector with_labels(std::vector<std::string> labels) const;

 private:
  Eigen::VectorXcd amplitudes_;
  std::vector<std::string> labels_;
};

}  // namespace tsvf
