#pragma once

#include <array>
#include <string>

#include "tsvflab/hilbert.hpp"

namespace tsvf {

/// (|1⟩|1⟩ + |2⟩|2⟩)/√2 on C²⊗C², labels "11","12","21","22".
StateVector phi_plus();

/// (|e⟩|g⟩ + |g⟩|e⟩)/√2 on C²⊗C², labels "ee","eg","ge","gg".
StateVector psi_plus();

/// α|e⟩|g⟩ + β|g⟩|e⟩ with α = √(1−β²) ≥ 0. Requires β in [0, 1].
StateVector excited_ground_superposition(double beta);

/// A unit direction on the Bloch sphere. θ is the polar angle from +z,
/// φ the azimuth from +x.
struct MeasurementSetting {
  double theta = 0.0;
  double phi = 0.0;

  std::array<double, 3> direction() const;  // (sinθ cosφ, sinθ sinφ, cosθ)
};

/// n̂·σ for one qubit: the ±1-valued observable along `setting`.
Operator observable(const MeasurementSetting& setting);

/// E(a, b) = ⟨state| (â·σ)⊗(b̂·σ) |state⟩ for a two-qubit pure state.
/// Real by hermiticity; the imaginary residue (< 1e-12 self tolerance)
/// is discarded.
double correlator(const StateVector& state, const MeasurementSetting& a,
                  const MeasurementSetting& b);

struct ChshResult {
  double s = 0.0;  // E(a,b) + E(a,b') + E(a',b) − E(a',b')
  std::array<double, 4> correlators{};  // E(a,b), E(a,b'), E(a',b), E(a',b')
  MeasurementSetting a, a_prime, b, b_prime;
};

/// The CHSH combination at fixed settings.
ChshResult chsh(const StateVector& state, const MeasurementSetting& a,
                const MeasurementSetting& a_prime,
                const MeasurementSetting& b,
                const MeasurementSetting& b_prime);

/// Maximizes |S| over measurement directions for the given two-qubit
/// state. Deterministic: an exhaustive pass over a 12×12 (θ, φ) grid per
/// side — ties broken toward the lexicographically smallest
/// (a, a′, b, b′) index tuple — seeds a coordinate-descent refinement
/// with closed-form single-side updates, iterated until |S| improves by
/// less than 1e-10. Returns the signed S of largest magnitude.
ChshResult optimize_chsh(const StateVector& state);

}  // namespace tsvf
