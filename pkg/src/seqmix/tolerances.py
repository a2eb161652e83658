"""Numeric tolerance knobs shared across the library and its property tests."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Single record holding every slack constant used by validation and checks.

    Keeping them in one place means the property-test suite and the report
    verdicts cannot drift apart on what "equal" means.
    """

    normalization: float = 1e-12     # probability vectors must sum to 1 within this
    conditional: float = 1e-10       # mixture conditionals / incremental-vs-direct agreement
    dominance: float = 1e-10         # log-space dominance slack
    entropy_inequality: float = 1e-12  # quadratic-vs-entropy inequality slack
    optimality: float = 1e-10        # informed-scheme optimality slack
    bound: float = 1e-9              # exact-mode bound verdict slack
    mc_roundoff: float = 1e-12       # absolute float-accumulation allowance on 3-sigma checks


DEFAULT_TOLERANCES = Tolerances()
