"""Pre/post-selected quantum systems: weak values, conditional
probabilities, probe simulations, Bell tests, and seeded Monte Carlo.

The heavy lifting lives in the compiled ``tsvflab._core`` extension; this
package re-exports it and adds small conveniences for driving the report
pipeline from Python.
"""

from __future__ import annotations

import json as _json
from typing import Any

from ._core import (
    GENERATOR_NAME,
    MIN_TRIALS,
    AblDistribution,
    ChshResult,
    DimensionError,
    EmptyEnsembleError,
    EnsembleStats,
    Error,
    IntermediateMeasurement,
    MeasurementSetting,
    Operator,
    PointerShift,
    SampledChsh,
    SpecError,
    StateVector,
    TwoStateVector,
    ValidationError,
    abl_probabilities,
    apply,
    basis_projector,
    chsh,
    correlator,
    estimate_conditional,
    estimate_postselection_rate,
    evolve,
    exchange_operator,
    excited_ground_superposition,
    inner_product,
    observable,
    optimize_chsh,
    phi_plus,
    pointer_shift,
    postselection_probability,
    psi_plus,
    run_cli,
    sample_chsh,
    strong_weak_correspondence,
    tensor,
    weak_value,
)

__all__ = [
    "GENERATOR_NAME",
    "MIN_TRIALS",
    "AblDistribution",
    "ChshResult",
    "CliError",
    "DimensionError",
    "EmptyEnsembleError",
    "EnsembleStats",
    "Error",
    "IntermediateMeasurement",
    "MeasurementSetting",
    "Operator",
    "PointerShift",
    "SampledChsh",
    "SpecError",
    "StateVector",
    "TwoStateVector",
    "ValidationError",
    "abl_probabilities",
    "apply",
    "basis_projector",
    "chsh",
    "correlator",
    "estimate_conditional",
    "estimate_postselection_rate",
    "evolve",
    "exchange_operator",
    "excited_ground_superposition",
    "inner_product",
    "observable",
    "optimize_chsh",
    "phi_plus",
    "pointer_shift",
    "postselection_probability",
    "psi_plus",
    "report",
    "run",
    "run_cli",
    "sample_chsh",
    "strong_weak_correspondence",
    "tensor",
    "weak_value",
]


class CliError(RuntimeError):
    """A CLI invocation exited with a nonzero code."""

    def __init__(self, exit_code: int, stderr: str):
        super().__init__(f"exit code {exit_code}: {stderr.strip()}")
        self.exit_code = exit_code
        self.stderr = stderr


def run(*args: str) -> str:
    """Run one CLI invocation and return its stdout.

    Raises ``CliError`` when the command exits nonzero.
    """
    code, out, err = run_cli(list(args))
    if code != 0:
        raise CliError(code, err)
    return out


def report(experiment: str, *flags: str) -> dict[str, Any]:
    """The JSON report of ``run <experiment>`` as a dictionary."""
    return _json.loads(run("run", experiment, "--format", "json", *flags))


def mc_report(experiment: str, *flags: str) -> dict[str, Any]:
    """The JSON report of ``mc <experiment>`` as a dictionary."""
    return _json.loads(run("mc", experiment, "--format", "json", *flags))
