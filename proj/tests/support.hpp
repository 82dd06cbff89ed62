#pragma once

// Shared helpers for the test suites: deterministic random instances and
// an independent Taylor-series matrix exponential used as an oracle for
// the spectral-decomposition evolution in the library.

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "tsvflab/operators.hpp"
#include "tsvflab/state.hpp"

namespace tsvf_test {

using tsvf::Complex;

inline std::mt19937_64 seeded_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

/// Unit-norm state with independent complex Gaussian amplitudes.
inline tsvf::StateVector random_state(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v(i) = Complex(gauss(rng), gauss(rng));
  }
  return tsvf::StateVector(v).normalized();
}

/// Random hermitian matrix (A + A†)/2 with Gaussian entries of the given
/// scale.
inline Eigen::MatrixXcd random_hermitian_entries(std::mt19937_64& rng,
                                                 Eigen::Index dim,
                                                 double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      a(r, c) = Complex(gauss(rng), gauss(rng));
    }
  }
  return 0.5 * (a + a.adjoint().eval());
}

/// exp(M) by scaling-and-squaring with a straight Taylor series — no
/// eigendecomposition anywhere, so it is an independent check on
/// spectral-method propagators.
inline Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& m) {
  const double norm = m.norm();
  int squarings = 0;
  Eigen::MatrixXcd scaled = m;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    scaled /= std::pow(2.0, squarings);
  }
  Eigen::MatrixXcd result =
      Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  Eigen::MatrixXcd term = result;
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (term.norm() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// exp(−i·H·t), the propagator oracle.
inline Eigen::MatrixXcd propagator_taylor(const Eigen::MatrixXcd& h,
                                          double t) {
  return expm_taylor(Complex(0.0, -1.0) * t * h);
}

}  // namespace tsvf_test
