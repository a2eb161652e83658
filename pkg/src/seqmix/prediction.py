"""Argmax predictors, expected-error ledgers, and the error-excess bound.

A predictor deterministically outputs the symbol its strategy considers
most probable next (ties to the lowest index).  Errors are scored against
the true source: the per-step error is the truth's probability of any other
symbol, and the ledger accumulates its expectation over prefixes, exactly
by enumeration or estimated over sampled paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence as SequenceABC

import numpy as np

from .enumeration import DEFAULT_ENUMERATION_BUDGET, walk_support
from .mixture import MixtureSource, ModelClass
from .montecarlo import argmax_lowest, cumulative_mean_and_stderr, sample_path_statistics
from .sources import Sequence, Source


class ArgmaxPredictor:
    """Predicts the symbol maximizing the strategy's next-symbol probability."""

    def __init__(self, strategy: Source) -> None:
        self.strategy = strategy

    def predict(self, prefix: Sequence) -> int:
        return argmax_lowest(self.strategy.conditional_vector(prefix))

    def __repr__(self) -> str:
        return f"ArgmaxPredictor({self.strategy!r})"


def informed_predictor(model_class: ModelClass, truth_index: int) -> ArgmaxPredictor:
    """The scheme that knows the generating source."""
    return ArgmaxPredictor(model_class.models[truth_index])


def mixture_predictor(model_class: ModelClass) -> ArgmaxPredictor:
    """The universal scheme driven by the class mixture."""
    return ArgmaxPredictor(MixtureSource(model_class))


def step_error(truth_cond, predicted: int) -> float:
    """Probability the prediction is wrong: 1 - truth_cond[predicted]."""
    if not 0 <= predicted < len(truth_cond):
        raise ValueError(f"predicted symbol {predicted} out of range")
    return 1.0 - truth_cond[predicted]


@dataclass
class ErrorLedger:
    """Expected per-step errors and their running total.

    Exact ledgers come from full enumeration; Monte-Carlo ledgers carry the
    trial count, seed, and the standard error of each running total.
    """

    per_step: np.ndarray
    cumulative: np.ndarray
    flavor: str  # "exact" or "monte_carlo"
    trials: int | None = None
    seed: int | None = None
    stderr: np.ndarray | None = None

    @property
    def final(self) -> float:
        return float(self.cumulative[-1]) if len(self.cumulative) else 0.0

    @property
    def final_stderr(self) -> float:
        if self.stderr is None or len(self.stderr) == 0:
            return 0.0
        return float(self.stderr[-1])


def expected_errors_exact_multi(
    model_class: ModelClass,
    truth_index: int,
    strategies: SequenceABC[Source],
    horizon: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> list[ErrorLedger]:
    """Exact error ledgers for several strategies from one support walk."""
    per_step = [np.zeros(horizon) for _ in strategies]

    def visit(node) -> None:
        k = node.step - 1
        for i, cond in enumerate(node.extra_conds):
            predicted = argmax_lowest(cond)
            per_step[i][k] += node.truth_prob * (1.0 - node.truth_cond[predicted])

    walk_support(
        model_class,
        truth_index,
        horizon,
        visit,
        budget=budget,
        extra_sources=strategies,
    )
    return [
        ErrorLedger(per_step=ps, cumulative=np.cumsum(ps), flavor="exact")
        for ps in per_step
    ]


def expected_errors_exact(
    model_class: ModelClass,
    truth_index: int,
    strategy: Source,
    horizon: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> ErrorLedger:
    """Exact expected errors of one argmax strategy over the first n steps."""
    return expected_errors_exact_multi(
        model_class, truth_index, [strategy], horizon, budget=budget
    )[0]


def expected_errors_mc(
    model_class: ModelClass,
    truth_index: int,
    strategy: Source,
    horizon: int,
    trials: int,
    seed: int,
) -> ErrorLedger:
    """Monte-Carlo estimate of the expected-error ledger.

    Unbiased for the exact ledger; deterministic given the seed.
    """
    stats = sample_path_statistics(
        model_class,
        truth_index,
        horizon,
        trials,
        seed,
        {"strategy": strategy},
    )
    per_trial = stats.errors["strategy"]
    cumulative, stderr = cumulative_mean_and_stderr(per_trial)
    return ErrorLedger(
        per_step=per_trial.mean(axis=0),
        cumulative=cumulative,
        flavor="monte_carlo",
        trials=trials,
        seed=seed,
        stderr=stderr,
    )


@dataclass(frozen=True)
class ExcessErrorBound:
    """Upper bounds on how many more errors the mixture scheme can make."""

    tight: float
    loose: float


def error_excess_bound(informed_errors: float, cum_kl: float) -> ExcessErrorBound:
    """Bound the mixture scheme's error excess by the informed scheme's
    errors E and the cumulative relative entropy H:

        excess <= H + sqrt(4*E*H + H**2) <= 2*H + 2*sqrt(E*H)
    """
    if informed_errors < 0:
        raise ValueError("expected errors must be nonnegative")
    if cum_kl < 0:
        raise ValueError("cumulative relative entropy must be nonnegative")
    tight = cum_kl + math.sqrt(4.0 * informed_errors * cum_kl + cum_kl**2)
    loose = 2.0 * cum_kl + 2.0 * math.sqrt(informed_errors * cum_kl)
    return ExcessErrorBound(tight=tight, loose=loose)
