#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tsvf {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible or unusable dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inputs that violate a documented precondition (non-hermitian
/// hamiltonian, non-orthogonal projector set, out-of-range time, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Experiment spec file problems. Carries the offending field path
/// ("hamiltonian[2][1]", "partitions[0].projectors[1]", ...).
class SpecError : public Error {
 public:
  SpecError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A Monte Carlo run ended with zero post-selected trials, so no
/// conditional quantity can be estimated.
class EmptyEnsembleError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsvf
