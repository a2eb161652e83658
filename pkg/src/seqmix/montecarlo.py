"""Sampled-path engine behind every Monte-Carlo estimator.

Paths are drawn from the true source, one independent generator per trial
(see `sources.trial_rng`).  At each step the engine records conditional
expectations given the sampled prefix rather than raw 0/1 outcomes: the
per-step error is 1 - truth(predicted | prefix), the per-step loss is the
truth-expected loss of the chosen action, and so on.  These estimators are
unbiased for the same totals the exact enumeration computes, with strictly
smaller variance, and they collapse to zero spread on deterministic truths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence as SequenceABC

import numpy as np

from .information import step_kl, step_sq
from .mixture import MixtureSource, MixtureState, ModelClass
from .sources import Source, trial_rng


def argmax_lowest(values) -> int:
    """Index of the maximum; ties go to the lowest index."""
    best = 0
    best_value = values[0]
    for i in range(1, len(values)):
        if values[i] > best_value:
            best = i
            best_value = values[i]
    return best


def argmin_lowest(values) -> int:
    """Index of the minimum; ties go to the lowest index."""
    best = 0
    best_value = values[0]
    for i in range(1, len(values)):
        if values[i] < best_value:
            best = i
            best_value = values[i]
    return best


@dataclass
class PathStatistics:
    """Per-trial, per-step conditional expectations along sampled paths.

    Every array has shape (trials, horizon).  `errors`, `losses`, and
    `profits` are keyed by strategy label; absent collections are None.
    """

    horizon: int
    trials: int
    seed: int
    kl: np.ndarray | None
    sq: np.ndarray | None
    errors: dict[str, np.ndarray]
    losses: dict[str, np.ndarray] | None
    profits: dict[str, np.ndarray] | None


def sample_path_statistics(
    model_class: ModelClass,
    truth_index: int,
    horizon: int,
    trials: int,
    seed: int,
    strategies: Mapping[str, Source],
    *,
    loss_table: np.ndarray | None = None,
    active_steps: SequenceABC[bool] | None = None,
    profit_table: np.ndarray | None = None,
    collect_info: bool = False,
) -> PathStatistics:
    """Walk `trials` sampled paths, recording the requested expectations.

    `loss_table` has shape (alphabet, actions); masked steps (active_steps
    false) contribute zero loss.  `profit_table` likewise maps (outcome,
    action) to profit; the action at each step minimizes the strategy's
    expected loss or maximizes its expected profit respectively.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= truth_index < len(model_class):
        raise ValueError(f"truth index {truth_index} outside class of size {len(model_class)}")
    truth = model_class.models[truth_index]
    size = model_class.alphabet.size
    labels = list(strategies)

    if active_steps is not None and len(active_steps) != horizon:
        raise ValueError("active_steps must have one flag per step")

    loss_rows = None
    if loss_table is not None:
        loss_rows = [tuple(float(v) for v in row) for row in np.asarray(loss_table, float)]
        n_actions = len(loss_rows[0])
    profit_rows = None
    if profit_table is not None:
        profit_rows = [tuple(float(v) for v in row) for row in np.asarray(profit_table, float)]
        n_bets = len(profit_rows[0])

    kl = np.zeros((trials, horizon)) if collect_info else None
    sq = np.zeros((trials, horizon)) if collect_info else None
    errors = {lab: np.zeros((trials, horizon)) for lab in labels}
    losses = {lab: np.zeros((trials, horizon)) for lab in labels} if loss_rows else None
    profits = {lab: np.zeros((trials, horizon)) for lab in labels} if profit_rows else None

    # A mixture strategy over this class doubles as the info tracker.
    info_index = next(
        (
            i
            for i, lab in enumerate(labels)
            if isinstance(strategies[lab], MixtureSource)
            and strategies[lab].model_class is model_class
        ),
        None,
    )
    info_source = MixtureSource(model_class) if collect_info and info_index is None else None

    # the trial loop works on parallel lists; dict lookups stay outside it
    sources = [strategies[lab] for lab in labels]
    n_strategies = len(sources)
    error_mats = [errors[lab] for lab in labels]
    loss_mats = [losses[lab] for lab in labels] if losses else None
    profit_mats = [profits[lab] for lab in labels] if profits else None
    symbols = range(size)

    for t in range(trials):
        rng = trial_rng(seed, t)
        random = rng.random
        truth_state = truth.initial_state()
        states = [src.initial_state() for src in sources]
        info_state: MixtureState | None = (
            info_source.initial_state() if info_source is not None else None
        )
        for k in range(horizon):
            truth_cond = truth.state_conditional_vector(truth_state)
            conds = [
                src.state_conditional_vector(st) for src, st in zip(sources, states)
            ]
            if collect_info:
                if info_index is not None:
                    mixture_cond = conds[info_index]
                else:
                    mixture_cond = info_source.state_conditional_vector(info_state)
                kl[t, k] = step_kl(truth_cond, mixture_cond)
                sq[t, k] = step_sq(truth_cond, mixture_cond)

            for i in range(n_strategies):
                cond = conds[i]
                error_mats[i][t, k] = 1.0 - truth_cond[argmax_lowest(cond)]
                if loss_rows is not None and (active_steps is None or active_steps[k]):
                    expected = [
                        sum(cond[x] * loss_rows[x][y] for x in symbols)
                        for y in range(n_actions)
                    ]
                    action = argmin_lowest(expected)
                    loss_mats[i][t, k] = sum(
                        truth_cond[x] * loss_rows[x][action] for x in symbols
                    )
                if profit_rows is not None:
                    expected = [
                        sum(cond[x] * profit_rows[x][y] for x in symbols)
                        for y in range(n_bets)
                    ]
                    bet = argmax_lowest(expected)
                    profit_mats[i][t, k] = sum(
                        truth_cond[x] * profit_rows[x][bet] for x in symbols
                    )

            u = random()
            acc = 0.0
            outcome = size - 1
            for a in symbols:
                acc += truth_cond[a]
                if u < acc:
                    outcome = a
                    break
            truth_state = truth.next_state(truth_state, outcome)
            for i in range(n_strategies):
                states[i] = sources[i].next_state(states[i], outcome)
            if info_source is not None:
                info_state = info_source.next_state(info_state, outcome)

    return PathStatistics(
        horizon=horizon,
        trials=trials,
        seed=seed,
        kl=kl,
        sq=sq,
        errors=errors,
        losses=losses,
        profits=profits,
    )


def cumulative_mean_and_stderr(per_step: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of the running per-trial totals.

    Input shape (trials, horizon); outputs have shape (horizon,).  The
    standard error of a single-trial run is reported as zero.
    """
    totals = np.cumsum(per_step, axis=1)
    mean = totals.mean(axis=0)
    trials = per_step.shape[0]
    if trials > 1:
        stderr = totals.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        stderr = np.zeros(per_step.shape[1])
    return mean, stderr
