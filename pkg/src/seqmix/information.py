"""Relative-entropy instruments for tracking how fast the mixture learns.

Per step, two distances between the true and mixture next-symbol
distributions are accumulated: the relative entropy (KL divergence, nats)
and the summed squared difference.  The squared distance never exceeds the
relative entropy for a step, and the cumulative relative entropy never
exceeds ln(1/w) where w is the prior weight of the true source, so both
running sums are squeezed by a horizon-free constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enumeration import DEFAULT_ENUMERATION_BUDGET, walk_support
from .mixture import ModelClass
from .tolerances import DEFAULT_TOLERANCES


def _check_prob_vector(vec, name: str) -> None:
    total = 0.0
    for p in vec:
        if p < 0.0:
            raise ValueError(f"{name} has a negative entry: {p}")
        total += p
    if abs(total - 1.0) > DEFAULT_TOLERANCES.conditional:
        raise ValueError(f"{name} sums to {total!r}, expected 1")


def step_kl(p, q) -> float:
    """Relative entropy sum(p_i * ln(p_i / q_i)) in nats.

    Zero terms follow 0*ln(0/z) := 0 even for z = 0.  A positive p_i against
    q_i = 0 yields +inf, the numeric signature of a dominance violation; it
    propagates through ledgers rather than raising.
    """
    _check_prob_vector(p, "p")
    _check_prob_vector(q, "q")
    total = 0.0
    for pi, qi in zip(p, q):
        if pi == 0.0:
            continue
        if qi == 0.0:
            return math.inf
        total += pi * math.log(pi / qi)
    return total


def step_sq(p, q) -> float:
    """Summed squared difference sum((p_i - q_i)**2)."""
    _check_prob_vector(p, "p")
    _check_prob_vector(q, "q")
    return sum((pi - qi) ** 2 for pi, qi in zip(p, q))


@dataclass(frozen=True)
class InequalityCheck:
    """Evaluation of the quadratic-vs-entropy inequality for one pair."""

    lhs: float
    rhs: float
    holds: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def check_entropy_inequality(p, q) -> InequalityCheck:
    """Check sum((p-q)**2) <= sum(p*ln(p/q)) for two probability vectors.

    An infinite right-hand side counts as holding.
    """
    lhs = step_sq(p, q)
    rhs = step_kl(p, q)
    holds = lhs <= rhs + DEFAULT_TOLERANCES.entropy_inequality
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=holds)


@dataclass
class InfoLedger:
    """Per-step and cumulative distance sums between truth and mixture.

    `per_step_kl[k-1]` is the truth-expected relative entropy at step k,
    `cum_kl` its running sum, and likewise for the squared distance.
    `entropy_bound` is ln(1/prior weight of the true source).
    """

    per_step_kl: np.ndarray
    per_step_sq: np.ndarray
    cum_kl: np.ndarray
    cum_sq: np.ndarray
    entropy_bound: float

    @property
    def horizon(self) -> int:
        return len(self.per_step_kl)

    @property
    def final_kl(self) -> float:
        return float(self.cum_kl[-1]) if self.horizon else 0.0

    @property
    def final_sq(self) -> float:
        return float(self.cum_sq[-1]) if self.horizon else 0.0


def accumulate_exact(
    model_class: ModelClass,
    truth_index: int,
    horizon: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> InfoLedger:
    """Exact distance ledger by enumerating the truth's support tree."""
    kl = np.zeros(horizon)
    sq = np.zeros(horizon)

    def visit(node) -> None:
        k = node.step - 1
        kl[k] += node.truth_prob * step_kl(node.truth_cond, node.mixture_cond)
        sq[k] += node.truth_prob * step_sq(node.truth_cond, node.mixture_cond)

    walk_support(model_class, truth_index, horizon, visit, budget=budget)
    return InfoLedger(
        per_step_kl=kl,
        per_step_sq=sq,
        cum_kl=np.cumsum(kl),
        cum_sq=np.cumsum(sq),
        entropy_bound=model_class.entropy_bound(truth_index),
    )
