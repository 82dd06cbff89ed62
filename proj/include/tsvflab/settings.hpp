#pragma once

namespace tsvf {

/// Global numeric tolerances.
///
/// `input` guards user-supplied data (orthogonality of projector sets,
/// hermiticity of hamiltonians, partition completeness); `self` bounds
/// internal consistency checks (norm preservation, projector idempotence,
/// declared structure flags). Both are mutable through tolerances() so a
/// caller can tighten or relax them process-wide.
struct Tolerances {
  double input = 1e-10;
  double self = 1e-12;
};

Tolerances& tolerances();

}  // namespace tsvf
