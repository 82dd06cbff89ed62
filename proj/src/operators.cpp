#include "tsvflab/operators.hpp"

#include <utility>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

Operator::Operator(Eigen::MatrixXcd entries, OpStructure structure,
                   std::string name)
    : entries_(std::move(entries)),
      structure_(structure),
      name_(std::move(name)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw DimensionError("operator must be a nonempty square matrix, got " +
                         std::to_string(entries_.rows()) + "x" +
                         std::to_string(entries_.cols()));
  }
  const double tol = tolerances().self;
  if (structure_.hermitian && !is_hermitian(tol)) {
    throw ValidationError("operator '" + name_ +
                          "' declared hermitian but is not");
  }
  if (structure_.unitary && !is_unitary(tol)) {
    throw ValidationError("operator '" + name_ +
                          "' declared unitary but is not");
  }
  if (structure_.projector && !is_projector(tol)) {
    throw ValidationError("operator '" + name_ +
                          "' declared a projector but is not");
  }
}

Operator Operator::identity(Eigen::Index dim) {
  return Operator(Eigen::MatrixXcd::Identity(dim, dim),
                  {.hermitian = true, .unitary = true, .projector = true},
                  "I");
}

Operator Operator::zero(Eigen::Index dim) {
  return Operator(Eigen::MatrixXcd::Zero(dim, dim),
                  {.hermitian = true, .unitary = false, .projector = true},
                  "0");
}

Operator Operator::hermitian(Eigen::MatrixXcd entries, std::string name) {
  return Operator(std::move(entries), {.hermitian = true}, std::move(name));
}

Operator Operator::with_name(std::string name) const {
  return Operator(entries_, structure_, std::move(name));
}

bool Operator::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_unitary(double tol) const {
  const Eigen::MatrixXcd gram = entries_.adjoint() * entries_;
  return (gram - Eigen::MatrixXcd::Identity(dim(), dim()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

bool Operator::is_projector(double tol) const {
  if (!is_hermitian(tol)) return false;
  return (entries_ * entries_ - entries_).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::adjoint() const {
  return Operator(entries_.adjoint(), structure_,
                  name_.empty() ? "" : name_ + "^†");
}

}  // namespace tsvf
