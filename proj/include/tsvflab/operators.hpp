#pragma once

#include <Eigen/Dense>
#include <string>

#include "tsvflab/state.hpp"

namespace tsvf {

/// Structure flags declared for an Operator. Flags are verified against
/// the matrix entries at construction time, so a set flag is a checked
/// promise, not a hint.
struct OpStructure {
  bool hermitian = false;
  bool unitary = false;
  bool projector = false;
};

/// A square complex matrix over the same basis conventions as
/// StateVector, with optional structure flags and a display name used in
/// report tables.
class Operator {
 public:
  explicit Operator(Eigen::MatrixXcd entries, OpStructure structure = {},
                    std::string name = "");

  static Operator identity(Eigen::Index dim);
  static Operator zero(Eigen::Index dim);
  /// Convenience factory asserting hermiticity of `entries`.
  static Operator hermitian(Eigen::MatrixXcd entries, std::string name = "");

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  const OpStructure& structure() const { return structure_; }
  const std::string& name() const { return name_; }

  Operator with_name(std::string name) const;

  /// Content checks against the stored entries (flag-independent).
  bool is_hermitian(double tol) const;
  bool is_unitary(double tol) const;
  bool is_projector(double tol) const;

  Operator adjoint() const;

 private:
  Eigen::MatrixXcd entries_;
  OpStructure structure_;
  std::string name_;
};

}  // namespace tsvf
