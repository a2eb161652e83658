"""Loss-minimizing action schemes, the loss-excess bound, and betting games.

An action scheme picks, at each step, the action minimizing its strategy's
expected loss over the next symbol.  With the unit error loss (wrong
prediction costs 1) this reduces exactly to argmax prediction.  A game of
chance is folded into the same machinery by identifying loss with negative
profit, which also yields a bound on how many rounds the mixture scheme
needs to reach the winning zone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence as SequenceABC

import numpy as np

from .enumeration import DEFAULT_ENUMERATION_BUDGET, walk_support
from .mixture import MixtureSource, ModelClass
from .montecarlo import (
    argmin_lowest,
    cumulative_mean_and_stderr,
    sample_path_statistics,
)
from .prediction import ErrorLedger
from .sources import Alphabet, Sequence, Source

_RANGE_SLACK = 1e-12  # float slack when checking declared entry ranges


class LossMatrix:
    """Loss table l[outcome][action] with a declared range.

    Every entry must lie in [l_min, l_min + l_delta].  The declared range is
    part of the contract because the loss-excess bound scales with l_delta,
    not with the realized spread of the table.
    """

    def __init__(self, table, l_min: float, l_delta: float) -> None:
        t = np.asarray(table, dtype=float)
        if t.ndim != 2 or t.shape[0] < 2 or t.shape[1] < 1:
            raise ValueError(f"loss table must be (outcomes >= 2, actions >= 1), got {t.shape}")
        if l_delta < 0:
            raise ValueError("l_delta must be nonnegative")
        if np.any(t < l_min - _RANGE_SLACK) or np.any(t > l_min + l_delta + _RANGE_SLACK):
            raise ValueError(
                f"loss entries leave the declared range [{l_min}, {l_min + l_delta}]"
            )
        self.table = t
        self.l_min = float(l_min)
        self.l_delta = float(l_delta)
        self._rows = tuple(tuple(float(v) for v in row) for row in t)

    @property
    def num_outcomes(self) -> int:
        return self.table.shape[0]

    @property
    def num_actions(self) -> int:
        return self.table.shape[1]

    @classmethod
    def error_loss(cls, alphabet: Alphabet) -> "LossMatrix":
        """Unit loss for a wrong prediction, zero for a correct one."""
        n = alphabet.size
        return cls(1.0 - np.eye(n), l_min=0.0, l_delta=1.0)

    @classmethod
    def from_profit(cls, profit_table, p_max: float, p_delta: float) -> "LossMatrix":
        """Identify loss with negative profit."""
        return cls(-np.asarray(profit_table, dtype=float), l_min=-p_max, l_delta=p_delta)

    def expected_losses(self, cond) -> tuple[float, ...]:
        """Expected loss of each action under a next-symbol distribution."""
        return tuple(
            sum(cond[x] * self._rows[x][y] for x in range(self.num_outcomes))
            for y in range(self.num_actions)
        )


def act(strategy: Source, prefix: Sequence, loss: LossMatrix) -> int:
    """Action minimizing the strategy-expected loss; ties to the lowest index."""
    if loss.num_outcomes != strategy.alphabet.size:
        raise ValueError("loss table outcomes must match the alphabet size")
    cond = strategy.conditional_vector(prefix)
    return argmin_lowest(loss.expected_losses(cond))


LossLedger = ErrorLedger  # identical shape: per-step values, running total, MC stderr


def expected_loss_exact_multi(
    model_class: ModelClass,
    truth_index: int,
    strategies: SequenceABC[Source],
    losses: SequenceABC[LossMatrix],
    horizon: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    active_steps: SequenceABC[bool] | None = None,
) -> list[list[LossLedger]]:
    """Exact loss ledgers for every (strategy, loss) pair in one walk.

    Returns ledgers indexed [strategy][loss].  Steps with a false
    `active_steps` flag contribute zero loss (partial prediction).
    """
    if active_steps is not None and len(active_steps) != horizon:
        raise ValueError("active_steps must have one flag per step")
    for loss in losses:
        if loss.num_outcomes != model_class.alphabet.size:
            raise ValueError("loss table outcomes must match the alphabet size")
    per_step = [[np.zeros(horizon) for _ in losses] for _ in strategies]

    def visit(node) -> None:
        k = node.step - 1
        if active_steps is not None and not active_steps[k]:
            return
        for i, cond in enumerate(node.extra_conds):
            for j, loss in enumerate(losses):
                action = argmin_lowest(loss.expected_losses(cond))
                realized = sum(
                    node.truth_cond[x] * loss._rows[x][action]
                    for x in range(loss.num_outcomes)
                )
                per_step[i][j][k] += node.truth_prob * realized

    walk_support(
        model_class,
        truth_index,
        horizon,
        visit,
        budget=budget,
        extra_sources=strategies,
    )
    return [
        [
            LossLedger(per_step=ps, cumulative=np.cumsum(ps), flavor="exact")
            for ps in row
        ]
        for row in per_step
    ]


def expected_loss_exact(
    model_class: ModelClass,
    truth_index: int,
    strategy: Source,
    loss: LossMatrix,
    horizon: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    active_steps: SequenceABC[bool] | None = None,
) -> LossLedger:
    """Exact expected losses of one action scheme over the first n steps."""
    return expected_loss_exact_multi(
        model_class,
        truth_index,
        [strategy],
        [loss],
        horizon,
        budget=budget,
        active_steps=active_steps,
    )[0][0]


def expected_loss_mc(
    model_class: ModelClass,
    truth_index: int,
    strategy: Source,
    loss: LossMatrix,
    horizon: int,
    trials: int,
    seed: int,
    *,
    active_steps: SequenceABC[bool] | None = None,
) -> LossLedger:
    """Monte-Carlo estimate of the expected-loss ledger."""
    stats = sample_path_statistics(
        model_class,
        truth_index,
        horizon,
        trials,
        seed,
        {"strategy": strategy},
        loss_table=loss.table,
        active_steps=active_steps,
    )
    per_trial = stats.losses["strategy"]
    cumulative, stderr = cumulative_mean_and_stderr(per_trial)
    return LossLedger(
        per_step=per_trial.mean(axis=0),
        cumulative=cumulative,
        flavor="monte_carlo",
        trials=trials,
        seed=seed,
        stderr=stderr,
    )


def loss_bound(
    informed_loss: float, horizon: int, cum_kl: float, loss: LossMatrix
) -> float:
    """Upper bound on the mixture scheme's loss excess after n steps:

        excess <= d*H + sqrt(4*(L - n*l_min)*d*H + d**2 * H**2)

    with d the declared loss spread, H the cumulative relative entropy, and
    L the informed scheme's loss.  With the unit error loss this is exactly
    the tight error-excess bound.
    """
    if cum_kl < 0:
        raise ValueError("cumulative relative entropy must be nonnegative")
    shifted = informed_loss - horizon * loss.l_min
    if shifted < -_RANGE_SLACK * max(1.0, horizon):
        raise ValueError(
            f"informed loss {informed_loss} below the floor {horizon * loss.l_min}"
        )
    shifted = max(shifted, 0.0)
    d = loss.l_delta
    return d * cum_kl + math.sqrt(4.0 * shifted * d * cum_kl + (d * cum_kl) ** 2)


@dataclass(frozen=True)
class BetRound:
    """One realized betting round; profit is reward minus stake."""

    stake: float
    action: int
    outcome: int
    reward: float
    p_max: float
    p_delta: float

    @property
    def profit(self) -> float:
        return self.reward - self.stake

    def __post_init__(self) -> None:
        if not self.p_max - self.p_delta - _RANGE_SLACK <= self.profit <= self.p_max + _RANGE_SLACK:
            raise ValueError(
                f"profit {self.profit} outside declared range "
                f"[{self.p_max - self.p_delta}, {self.p_max}]"
            )


class BettingGame:
    """A repeated game of chance: stake per action, reward per (outcome, action).

    The declared profit range [p_max - p_delta, p_max] must contain every
    realizable profit; p_delta plays the role of the loss spread once the
    game is folded into a LossMatrix via loss = -profit.
    """

    def __init__(self, stakes, rewards, p_max: float, p_delta: float) -> None:
        s = np.asarray(stakes, dtype=float)
        r = np.asarray(rewards, dtype=float)
        if s.ndim != 1 or r.ndim != 2 or r.shape[1] != s.shape[0]:
            raise ValueError("rewards must be (outcomes, actions) matching stakes")
        if p_delta < 0:
            raise ValueError("p_delta must be nonnegative")
        profit = r - s[np.newaxis, :]
        if np.any(profit > p_max + _RANGE_SLACK) or np.any(
            profit < p_max - p_delta - _RANGE_SLACK
        ):
            raise ValueError("some profit leaves the declared range")
        self.stakes = s
        self.rewards = r
        self.p_max = float(p_max)
        self.p_delta = float(p_delta)

    @property
    def num_actions(self) -> int:
        return self.stakes.shape[0]

    def profit_table(self) -> np.ndarray:
        return self.rewards - self.stakes[np.newaxis, :]

    def loss_matrix(self) -> LossMatrix:
        return LossMatrix.from_profit(self.profit_table(), self.p_max, self.p_delta)

    def play_round(self, action: int, outcome: int) -> BetRound:
        return BetRound(
            stake=float(self.stakes[action]),
            action=action,
            outcome=outcome,
            reward=float(self.rewards[outcome, action]),
            p_max=self.p_max,
            p_delta=self.p_delta,
        )

    @classmethod
    def even_money(cls, alphabet: Alphabet, stake: float = 1.0) -> "BettingGame":
        """Bet the stake on one symbol; a hit pays double, a miss pays nothing."""
        n = alphabet.size
        return cls(
            stakes=np.full(n, stake),
            rewards=2.0 * stake * np.eye(n),
            p_max=stake,
            p_delta=2.0 * stake,
        )


@dataclass
class BettingReport:
    """Average per-round profits of both schemes and the winning-zone entry.

    `avg_profit_*[k-1]` is the estimated expected cumulative profit through
    round k divided by k.  `crossing_step` is the first round at which the
    mixture scheme's average profit is positive, None if it never is.
    """

    horizon: int
    trials: int
    seed: int
    avg_profit_informed: np.ndarray
    avg_profit_mixture: np.ndarray
    stderr_informed: np.ndarray
    stderr_mixture: np.ndarray
    crossing_step: int | None

    @property
    def final_informed(self) -> float:
        return float(self.avg_profit_informed[-1])

    @property
    def final_mixture(self) -> float:
        return float(self.avg_profit_mixture[-1])


def winning_zone_bound(
    p_delta: float, informed_avg_profit: float, entropy_bound: float
) -> float:
    """Rounds the mixture scheme may need before its average profit turns
    positive: (2*p_delta / informed_avg_profit)**2 * entropy_bound.

    Only meaningful when the informed scheme is profitable at all.
    """
    if informed_avg_profit <= 0:
        raise ValueError("winning-zone bound needs a positive informed average profit")
    return (2.0 * p_delta / informed_avg_profit) ** 2 * entropy_bound


def simulate_betting(
    model_class: ModelClass,
    truth_index: int,
    game: BettingGame,
    horizon: int,
    trials: int,
    seed: int,
) -> BettingReport:
    """Estimate both schemes' average profit trajectories over sampled play.

    Each scheme maximizes its own expected profit per round (equivalently,
    minimizes the negative-profit loss); recorded profits are expectations
    under the true source given the sampled history.
    """
    if game.rewards.shape[0] != model_class.alphabet.size:
        raise ValueError("reward table outcomes must match the alphabet size")
    stats = sample_path_statistics(
        model_class,
        truth_index,
        horizon,
        trials,
        seed,
        {
            "informed": model_class.models[truth_index],
            "mixture": MixtureSource(model_class),
        },
        profit_table=game.profit_table(),
    )
    steps = np.arange(1, horizon + 1, dtype=float)
    cum_informed, stderr_informed = cumulative_mean_and_stderr(stats.profits["informed"])
    cum_mixture, stderr_mixture = cumulative_mean_and_stderr(stats.profits["mixture"])
    avg_informed = cum_informed / steps
    avg_mixture = cum_mixture / steps
    positive = np.nonzero(avg_mixture > 0.0)[0]
    crossing = int(positive[0]) + 1 if positive.size else None
    return BettingReport(
        horizon=horizon,
        trials=trials,
        seed=seed,
        avg_profit_informed=avg_informed,
        avg_profit_mixture=avg_mixture,
        stderr_informed=stderr_informed / steps,
        stderr_mixture=stderr_mixture / steps,
        crossing_step=crossing,
    )
