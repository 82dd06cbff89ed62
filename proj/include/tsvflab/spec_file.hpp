#pragma once

#include <iosfwd>
#include <string>

#include "tsvflab/experiments.hpp"

namespace tsvf {

/// A user-supplied experiment description, read from JSON. The schema is
/// strict: exactly these fields, unknown fields rejected, every
/// violation reported with the JSON path of the offending value.
///
/// {
///   "dim":               integer ≥ 2,
///   "pre":               [[re, im], ...]            (length dim),
///   "post":              [[re, im], ...]            (length dim),
///   "hamiltonian":       [[[re, im], ...], ...]     (dim×dim, hermitian
///                                                    within 1e-10),
///   "t_f":               number > 0                 (t0 is fixed at 0),
///   "measurement_times": [number, ...]              (each in [0, t_f]),
///   "partitions":        [{"name": string,
///                          "projectors": [projector, ...]}, ...]
/// }
///
/// A projector is either a list of 1-based basis indices (matching the
/// box numbering used everywhere else, e.g. [1] or [2, 3]) or an
/// explicit dim×dim matrix of [re, im] pairs. Partition order and
/// projector order are preserved in every report; each partition must
/// resolve the identity.
struct ExperimentSpecFile {
  TsvAnalysis analysis;
};

/// Parses and validates the schema above. Problems throw SpecError
/// carrying the path of the offending field ("/pre/2", "/hamiltonian/1/0",
/// "/partitions/0/projectors/1", ...) and what was expected.
ExperimentSpecFile parse_spec(std::istream& in);
ExperimentSpecFile parse_spec_file(const std::string& path);

}  // namespace tsvf
