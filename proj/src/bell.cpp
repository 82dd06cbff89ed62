#include "tsvflab/bell.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsvflab/errors.hpp"
#include "tsvflab/settings.hpp"

namespace tsvf {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2cd pauli(int axis) {
  Eigen::Matrix2cd m;
  switch (axis) {
    case 0:  // x
      m << 0, 1, 1, 0;
      break;
    case 1:  // y
      m << 0, -kI, kI, 0;
      break;
    default:  // z
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

Eigen::Matrix2cd direction_observable(const std::array<double, 3>& n) {
  return n[0] * pauli(0) + n[1] * pauli(1) + n[2] * pauli(2);
}

void require_two_qubits(const StateVector& state) {
  if (state.dim() != 4) {
    throw DimensionError("Bell-test states live on two qubits (dimension "
                         "4), got dimension " +
                         std::to_string(state.dim()));
  }
}

/// 3×3 correlation matrix T_ij = ⟨σ_i ⊗ σ_j⟩. E(a, b) = âᵀ T b̂, which
/// turns every correlator into a dot product and makes the closed-form
/// coordinate updates below exact.
Eigen::Matrix3d correlation_matrix(const StateVector& state) {
  const Eigen::VectorXcd psi = state.normalized().amplitudes();
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix4cd joint = Eigen::Matrix4cd::Zero();
      const Eigen::Matrix2cd a = pauli(i);
      const Eigen::Matrix2cd b = pauli(j);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          joint.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
        }
      }
      t(i, j) = (psi.adjoint() * joint * psi).value().real();
    }
  }
  return t;
}

Eigen::Vector3d as_vector(const std::array<double, 3>& n) {
  return Eigen::Vector3d(n[0], n[1], n[2]);
}

MeasurementSetting setting_from_vector(const Eigen::Vector3d& v) {
  const Eigen::Vector3d n = v.normalized();
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  return MeasurementSetting{theta, phi};
}

double s_of(const Eigen::Matrix3d& t, const Eigen::Vector3d& a,
            const Eigen::Vector3d& ap, const Eigen::Vector3d& b,
            const Eigen::Vector3d& bp) {
  return a.dot(t * b) + a.dot(t * bp) + ap.dot(t * b) - ap.dot(t * bp);
}

}  // namespace

StateVector phi_plus() {
  Eigen::VectorXcd amps(4);
  amps << 1.0 / std::numbers::sqrt2, 0.0, 0.0, 1.0 / std::numbers::sqrt2;
  return StateVector(amps, {"11", "12", "21", "22"});
}

StateVector psi_plus() {
  Eigen::VectorXcd amps(4);
  amps << 0.0, 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2, 0.0;
  return StateVector(amps, {"ee", "eg", "ge", "gg"});
}

StateVector excited_ground_superposition(double beta) {
  if (beta < 0.0 || beta > 1.0) {
    throw ValidationError("superposition weight beta must lie in [0, 1], got " +
                          std::to_string(beta));
  }
  const double alpha = std::sqrt(1.0 - beta * beta);
  Eigen::VectorXcd amps(4);
  amps << 0.0, alpha, beta, 0.0;
  return StateVector(amps, {"ee", "eg", "ge", "gg"});
}

std::array<double, 3> MeasurementSetting::direction() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

Operator observable(const MeasurementSetting& setting) {
  return Operator(direction_observable(setting.direction()),
                  {.hermitian = true, .unitary = true});
}

double correlator(const StateVector& state, const MeasurementSetting& a,
                  const MeasurementSetting& b) {
  require_two_qubits(state);
  const Eigen::Matrix3d t = correlation_matrix(state);
  return as_vector(a.direction()).dot(t * as_vector(b.direction()));
}

ChshResult chsh(const StateVector& state, const MeasurementSetting& a,
                const MeasurementSetting& a_prime,
                const MeasurementSetting& b,
                const MeasurementSetting& b_prime) {
  require_two_qubits(state);
  const Eigen::Matrix3d t = correlation_matrix(state);
  const Eigen::Vector3d va = as_vector(a.direction());
  const Eigen::Vector3d vap = as_vector(a_prime.direction());
  const Eigen::Vector3d vb = as_vector(b.direction());
  const Eigen::Vector3d vbp = as_vector(b_prime.direction());

  ChshResult result;
  result.correlators = {va.dot(t * vb), va.dot(t * vbp), vap.dot(t * vb),
                        vap.dot(t * vbp)};
  result.s = result.correlators[0] + result.correlators[1] +
             result.correlators[2] - result.correlators[3];
  result.a = a;
  result.a_prime = a_prime;
  result.b = b;
  result.b_prime = b_prime;
  return result;
}

ChshResult optimize_chsh(const StateVector& state) {
  require_two_qubits(state);
  const Eigen::Matrix3d t = correlation_matrix(state);

  // Candidate directions: a 12×12 (θ, φ) grid over the sphere. θ = 0
  // rows duplicate the pole for every φ; keeping them is harmless and
  // keeps the index arithmetic transparent.
  constexpr int kSteps = 12;
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(kSteps * kSteps);
  for (int it = 0; it < kSteps; ++it) {
    const double theta = std::numbers::pi * it / (kSteps - 1);
    for (int ip = 0; ip < kSteps; ++ip) {
      const double phi = 2.0 * std::numbers::pi * ip / kSteps;
      dirs.emplace_back(std::sin(theta) * std::cos(phi),
                        std::sin(theta) * std::sin(phi), std::cos(theta));
    }
  }
  const int n = static_cast<int>(dirs.size());

  // E-table: e(i, j) = dirs[i]ᵀ T dirs[j]. S factorizes over Bob's two
  // settings, S = max_b a·(Tb) + ... so for each (a, a') the best b and
  // b' are independent argmaxes — an O(n³) exact pass instead of O(n⁴),
  // with ties resolved toward the smallest (a, a', b, b') tuple by the
  // strict-inequality updates inside lexicographic loops.
  Eigen::MatrixXd e(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d ta = t.transpose() * dirs[i];
    for (int j = 0; j < n; ++j) e(i, j) = ta.dot(dirs[j]);
  }

  double best_s = 0.0;
  std::array<int, 4> best{0, 0, 0, 0};
  bool first = true;
  for (int ia = 0; ia < n; ++ia) {
    for (int iap = 0; iap < n; ++iap) {
      int ib = 0, ibp = 0;
      double vb = e(ia, 0) + e(iap, 0);
      double vbp = e(ia, 0) - e(iap, 0);
      for (int j = 1; j < n; ++j) {
        const double cb = e(ia, j) + e(iap, j);
        if (cb > vb) {
          vb = cb;
          ib = j;
        }
        const double cbp = e(ia, j) - e(iap, j);
        if (cbp > vbp) {
          vbp = cbp;
          ibp = j;
        }
      }
      const double s = vb + vbp;
      if (first || std::abs(s) > std::abs(best_s)) {
        first = false;
        best_s = s;
        best = {ia, iap, ib, ibp};
      }
    }
  }

  Eigen::Vector3d a = dirs[best[0]];
  Eigen::Vector3d ap = dirs[best[1]];
  Eigen::Vector3d b = dirs[best[2]];
  Eigen::Vector3d bp = dirs[best[3]];

  // Coordinate descent with closed-form block updates: for fixed Bob
  // settings, S = a·T(b+b') + a'·T(b−b') is maximized by aligning each
  // Alice vector with its coefficient (and symmetrically for Bob).
  // Maximizing |S| means maximizing s·S for the current sign s of S.
  double current = s_of(t, a, ap, b, bp);
  const double sign = current >= 0.0 ? 1.0 : -1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::Vector3d ga = sign * (t * (b + bp));
    if (ga.norm() > 0.0) a = ga.normalized();
    const Eigen::Vector3d gap = sign * (t * (b - bp));
    if (gap.norm() > 0.0) ap = gap.normalized();
    const Eigen::Vector3d gb = sign * (t.transpose() * (a + ap));
    if (gb.norm() > 0.0) b = gb.normalized();
    const Eigen::Vector3d gbp = sign * (t.transpose() * (a - ap));
    if (gbp.norm() > 0.0) bp = gbp.normalized();

    const double next = s_of(t, a, ap, b, bp);
    if (std::abs(std::abs(next) - std::abs(current)) < 1e-10) {
      current = next;
      break;
    }
    current = next;
  }

  return chsh(state, setting_from_vector(a), setting_from_vector(ap),
              setting_from_vector(b), setting_from_vector(bp));
}

}  // namespace tsvf
