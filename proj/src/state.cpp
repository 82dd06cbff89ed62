#include "tsvflab/state.hpp"

#include <utility>

#include "tsvflab/errors.hpp"

namespace tsvf {

StateVector::StateVector(Eigen::VectorXcd amplitudes,
                         std::vector<std::string> labels)
    : amplitudes_(std::move(amplitudes)), labels_(std::move(labels)) {
  if (amplitudes_.size() == 0) {
    throw DimensionError("state vector must have at least one amplitude");
  }
  if (!labels_.empty() &&
      labels_.size() != static_cast<std::size_t>(amplitudes_.size())) {
    throw DimensionError("label count " + std::to_string(labels_.size()) +
                         " does not match dimension " +
                         std::to_string(amplitudes_.size()));
  }
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index index,
                               std::vector<std::string> labels) {
  if (index < 0 || index >= dim) {
    throw DimensionError("basis index " + std::to_string(index) +
                         " out of range for dimension " + std::to_string(dim));
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(index) = Complex(1.0, 0.0);
  return StateVector(std::move(v), std::move(labels));
}

std::string StateVector::label(Eigen::Index i) const {
  if (i < 0 || i >= dim()) {
    throw DimensionError("label index " + std::to_string(i) +
                         " out of range for dimension " + std::to_string(dim()));
  }
  if (has_labels()) return labels_[static_cast<std::size_t>(i)];
  return std::to_string(i);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) {
    throw ValidationError("cannot normalize the zero vector");
  }
  return StateVector(amplitudes_ / n, labels_);
}

StateVector StateVector::with_labels(std::vector<std::string> labels) const {
  return StateVector(amplitudes_, std::move(labels));
}

}  // namespace tsvf
