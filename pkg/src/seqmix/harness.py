"""Configuration-driven experiment runner and bound-verification reports.

A run builds a model class from a YAML config, accumulates the exact or
Monte-Carlo ledgers, evaluates every applicable bound, and renders a CSV
report with a fixed column order and 17-significant-digit floats, so
identical configs produce byte-identical bytes.

Monte-Carlo verdicts allow three reported standard errors of slack
(propagated through bound formulas by the delta method) plus a tiny
absolute float-accumulation allowance; exact verdicts use the fixed
tolerances only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence as SequenceABC

import numpy as np
import yaml

from .decision import BettingGame, LossMatrix, loss_bound, winning_zone_bound
from .enumeration import DEFAULT_ENUMERATION_BUDGET, walk_support
from .information import step_kl, step_sq
from .mixture import MixtureSource, ModelClass, weight_by_description_length
from .montecarlo import (
    argmax_lowest,
    argmin_lowest,
    cumulative_mean_and_stderr,
    sample_path_statistics,
)
from .prediction import error_excess_bound
from .sources import (
    Alphabet,
    DeterministicPeriodic,
    IidCategorical,
    MarkovOrderM,
    Sequence,
    Source,
)
from .tolerances import DEFAULT_TOLERANCES

SCHEMA_VERSION = 1
SCHEMES = ("informed", "mixture")


class ConfigError(ValueError):
    """Invalid experiment configuration; lists every offending field."""

    def __init__(self, problems: SequenceABC[str]) -> None:
        super().__init__("invalid config: " + "; ".join(problems))
        self.problems = tuple(problems)


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelSpec:
    """Declarative description of one model-class member."""

    family: str
    probabilities: tuple[float, ...] | None = None
    order: int | None = None
    transitions: tuple[tuple[float, ...], ...] | None = None
    initial: tuple[float, ...] | None = None
    pattern: tuple[int, ...] | None = None

    def problems(self, path: str, alphabet_size: int) -> list[str]:
        out = []
        if self.family == "iid":
            if self.probabilities is None:
                out.append(f"{path}.probabilities: required for family 'iid'")
            elif len(self.probabilities) != alphabet_size:
                out.append(f"{path}.probabilities: expected {alphabet_size} entries")
        elif self.family == "markov":
            if self.order is None or self.order < 1:
                out.append(f"{path}.order: must be an integer >= 1")
            if self.transitions is None:
                out.append(f"{path}.transitions: required for family 'markov'")
            if self.initial is None:
                out.append(f"{path}.initial: required for family 'markov'")
            if (
                self.order is not None
                and self.transitions is not None
                and len(self.transitions) != alphabet_size**self.order
            ):
                out.append(
                    f"{path}.transitions: expected {alphabet_size ** self.order} rows"
                )
        elif self.family == "periodic":
            if not self.pattern:
                out.append(f"{path}.pattern: required for family 'periodic'")
            elif any(not 0 <= s < alphabet_size for s in self.pattern):
                out.append(f"{path}.pattern: symbols must be in 0..{alphabet_size - 1}")
        else:
            out.append(f"{path}.family: unknown family {self.family!r}")
        return out

    def build(self, alphabet: Alphabet) -> Source:
        if self.family == "iid":
            return IidCategorical(self.probabilities)
        if self.family == "markov":
            return MarkovOrderM(self.order, self.transitions, self.initial)
        if self.family == "periodic":
            return DeterministicPeriodic(Sequence.of(alphabet, self.pattern))
        raise ConfigError([f"unknown model family {self.family!r}"])


@dataclass(frozen=True)
class LossSpec:
    """Loss declaration: the built-in error loss or an explicit table."""

    kind: str = "error"
    table: tuple[tuple[float, ...], ...] | None = None
    l_min: float | None = None
    l_delta: float | None = None
    active_every: int | None = None  # keep only steps k with k % active_every == 0

    def problems(self, path: str) -> list[str]:
        out = []
        if self.kind not in ("error", "table"):
            out.append(f"{path}.kind: must be 'error' or 'table'")
        if self.kind == "table":
            if self.table is None:
                out.append(f"{path}.table: required for kind 'table'")
            if self.l_min is None or self.l_delta is None:
                out.append(f"{path}: l_min and l_delta must be declared for kind 'table'")
        if self.active_every is not None and self.active_every < 1:
            out.append(f"{path}.active_every: must be >= 1")
        return out

    def build(self, alphabet: Alphabet) -> LossMatrix:
        if self.kind == "error":
            return LossMatrix.error_loss(alphabet)
        return LossMatrix(self.table, l_min=self.l_min, l_delta=self.l_delta)

    def mask(self, horizon: int) -> list[bool] | None:
        if self.active_every is None:
            return None
        return [(k % self.active_every) == 0 for k in range(1, horizon + 1)]


@dataclass(frozen=True)
class BettingSpec:
    """Betting declaration: even-money on the outcome or explicit tables."""

    kind: str = "even_money"
    stake: float = 1.0
    stakes: tuple[float, ...] | None = None
    rewards: tuple[tuple[float, ...], ...] | None = None
    p_max: float | None = None
    p_delta: float | None = None

    def problems(self, path: str) -> list[str]:
        out = []
        if self.kind not in ("even_money", "table"):
            out.append(f"{path}.kind: must be 'even_money' or 'table'")
        if self.kind == "even_money" and self.stake <= 0:
            out.append(f"{path}.stake: must be positive")
        if self.kind == "table":
            if self.stakes is None or self.rewards is None:
                out.append(f"{path}: stakes and rewards required for kind 'table'")
            if self.p_max is None or self.p_delta is None:
                out.append(f"{path}: p_max and p_delta must be declared for kind 'table'")
        return out

    def build(self, alphabet: Alphabet) -> BettingGame:
        if self.kind == "even_money":
            return BettingGame.even_money(alphabet, stake=self.stake)
        return BettingGame(self.stakes, self.rewards, self.p_max, self.p_delta)


_TOP_LEVEL_KEYS = {
    "schema",
    "alphabet_size",
    "models",
    "weights",
    "truth_index",
    "horizon",
    "mode",
    "trials",
    "seed",
    "schemes",
    "loss",
    "betting",
    "enumeration_budget",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; validation collects all problems at once."""

    alphabet_size: int
    models: tuple[ModelSpec, ...]
    truth_index: int
    horizon: int
    schema: int = SCHEMA_VERSION
    weights: str | tuple[float, ...] = "uniform"
    mode: str = "exact"
    trials: int = 1000
    seed: int = 0
    schemes: tuple[str, ...] = SCHEMES
    loss: LossSpec | None = None
    betting: BettingSpec | None = None
    enumeration_budget: int = DEFAULT_ENUMERATION_BUDGET

    def validate(self) -> None:
        problems = []
        if self.schema != SCHEMA_VERSION:
            problems.append(f"schema: expected {SCHEMA_VERSION}, got {self.schema}")
        if self.alphabet_size < 2:
            problems.append("alphabet_size: must be >= 2")
        if not self.models:
            problems.append("models: must be nonempty")
        for i, spec in enumerate(self.models):
            problems.extend(spec.problems(f"models[{i}]", self.alphabet_size))
        if isinstance(self.weights, str):
            if self.weights not in ("uniform", "description_length"):
                problems.append(
                    "weights: must be 'uniform', 'description_length', or a vector"
                )
        elif len(self.weights) != len(self.models):
            problems.append("weights: vector length must match the number of models")
        if not 0 <= self.truth_index < max(len(self.models), 1):
            problems.append("truth_index: outside the model list")
        if self.horizon < 1:
            problems.append("horizon: must be >= 1")
        if self.mode not in ("exact", "monte_carlo"):
            problems.append("mode: must be 'exact' or 'monte_carlo'")
        if self.mode == "monte_carlo" and self.trials < 1:
            problems.append("trials: must be >= 1 in monte_carlo mode")
        if self.seed < 0:
            problems.append("seed: must be nonnegative")
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            problems.append(f"schemes: must be a nonempty subset of {SCHEMES}")
        if self.loss is not None:
            problems.extend(self.loss.problems("loss"))
        if self.betting is not None:
            problems.extend(self.betting.problems("betting"))
            if self.mode != "monte_carlo":
                problems.append("betting: requires monte_carlo mode")
        if self.enumeration_budget < 1:
            problems.append("enumeration_budget: must be >= 1")
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_mapping(cls, raw: Mapping) -> "ExperimentConfig":
        if not isinstance(raw, Mapping):
            raise ConfigError(["config root: expected a mapping"])
        unknown = sorted(set(raw) - _TOP_LEVEL_KEYS)
        if unknown:
            raise ConfigError([f"unknown key {k!r}" for k in unknown])

        def tupled(value):
            if isinstance(value, list):
                return tuple(tupled(v) for v in value)
            return value

        models = tuple(
            ModelSpec(**{k: tupled(v) for k, v in m.items()})
            for m in raw.get("models", [])
        )
        weights = raw.get("weights", "uniform")
        if isinstance(weights, list):
            weights = tuple(float(w) for w in weights)
        loss = raw.get("loss")
        betting = raw.get("betting")
        config = cls(
            schema=raw.get("schema", SCHEMA_VERSION),
            alphabet_size=raw.get("alphabet_size", 0),
            models=models,
            weights=weights,
            truth_index=raw.get("truth_index", -1),
            horizon=raw.get("horizon", 0),
            mode=raw.get("mode", "exact"),
            trials=raw.get("trials", 1000),
            seed=raw.get("seed", 0),
            schemes=tuple(raw.get("schemes", SCHEMES)),
            loss=LossSpec(**{k: tupled(v) for k, v in loss.items()}) if loss else None,
            betting=BettingSpec(**{k: tupled(v) for k, v in betting.items()})
            if betting
            else None,
            enumeration_budget=raw.get("enumeration_budget", DEFAULT_ENUMERATION_BUDGET),
        )
        config.validate()
        return config

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
        return cls.from_mapping(raw)

    def with_overrides(
        self, seed: int | None = None, trials: int | None = None
    ) -> "ExperimentConfig":
        updates = {}
        if seed is not None:
            updates["seed"] = seed
        if trials is not None:
            updates["trials"] = trials
        if not updates:
            return self
        from dataclasses import replace

        config = replace(self, **updates)
        config.validate()
        return config

    def build_model_class(self) -> ModelClass:
        alphabet = Alphabet(self.alphabet_size)
        models = [spec.build(alphabet) for spec in self.models]
        if self.weights == "uniform":
            return ModelClass.uniform(models)
        if self.weights == "description_length":
            return ModelClass(models, weight_by_description_length(models))
        return ModelClass(models, self.weights)


# ---------------------------------------------------------------------------
# report structure and CSV rendering
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


@dataclass(frozen=True)
class ReportRow:
    step: int | None
    scheme: str
    quantity: str
    value: float | None
    bound: float | None = None
    slack: float | None = None
    verdict: str = ""

    def render(self) -> str:
        return ",".join(
            (
                _fmt(self.step),
                self.scheme,
                self.quantity,
                _fmt(self.value),
                _fmt(self.bound),
                _fmt(self.slack),
                self.verdict,
            )
        )


@dataclass
class BoundReport:
    """Ordered per-step rows followed by one summary verdict row per check."""

    mode: str
    horizon: int
    rows: list[ReportRow] = field(default_factory=list)

    HEADER = "k,scheme,quantity,value,bound,slack,verdict"

    @property
    def verdicts(self) -> list[ReportRow]:
        return [r for r in self.rows if r.verdict]

    def verdict(self, quantity: str) -> ReportRow:
        for r in self.rows:
            if r.verdict and r.quantity == quantity:
                return r
        raise KeyError(quantity)

    @property
    def all_pass(self) -> bool:
        return all(r.verdict != "FAIL" for r in self.rows)

    def to_csv(self) -> str:
        return "\n".join([self.HEADER, *(r.render() for r in self.rows)]) + "\n"

    def summary_lines(self) -> list[str]:
        return [
            f"{r.quantity}: {r.verdict} (value={_fmt(r.value)}, bound={_fmt(r.bound)}, "
            f"slack={_fmt(r.slack)})"
            for r in self.verdicts
        ]


def _verdict_row(
    quantity: str, scheme: str, value: float, bound: float | None, margins
) -> ReportRow:
    """PASS iff every margin is nonnegative; worst margin is the recorded slack."""
    worst = float(np.min(margins)) if len(margins) else 0.0
    return ReportRow(
        step=None,
        scheme=scheme,
        quantity=quantity,
        value=value,
        bound=bound,
        slack=worst,
        verdict="PASS" if worst >= 0.0 else "FAIL",
    )


def _not_applicable(quantity: str, scheme: str = "") -> ReportRow:
    return ReportRow(
        step=None,
        scheme=scheme,
        quantity=quantity,
        value=None,
        bound=None,
        slack=None,
        verdict="NOT-APPLICABLE",
    )


# ---------------------------------------------------------------------------
# bound-formula derivatives for delta-method slack propagation
# ---------------------------------------------------------------------------

def _error_bound_partials(informed: float, kl: float) -> tuple[float, float]:
    root = math.sqrt(4.0 * informed * kl + kl * kl)
    if root == 0.0:
        return 0.0, 1.0
    return 2.0 * kl / root, 1.0 + (2.0 * informed + kl) / root


def _loss_bound_partials(shifted: float, kl: float, d: float) -> tuple[float, float]:
    root = math.sqrt(4.0 * shifted * d * kl + (d * kl) ** 2)
    if root == 0.0:
        return 0.0, d
    return 2.0 * d * kl / root, d + (2.0 * shifted * d + d * d * kl) / root


# ---------------------------------------------------------------------------
# exact and Monte-Carlo statistics collection
# ---------------------------------------------------------------------------

@dataclass
class _Series:
    """One cumulative series with (possibly zero) per-step standard errors."""

    cumulative: np.ndarray
    stderr: np.ndarray

    @classmethod
    def exact(cls, per_step: np.ndarray) -> "_Series":
        return cls(np.cumsum(per_step), np.zeros(len(per_step)))

    @classmethod
    def sampled(cls, per_trial: np.ndarray) -> "_Series":
        mean, err = cumulative_mean_and_stderr(per_trial)
        return cls(mean, err)


@dataclass
class _RunStatistics:
    kl: _Series
    sq: _Series
    errors: dict[str, _Series]
    error_excess: _Series | None   # paired mixture-minus-informed series
    losses: dict[str, _Series] | None
    loss_excess: _Series | None
    per_step_kl: np.ndarray
    per_step_errors: dict[str, np.ndarray]
    per_step_losses: dict[str, np.ndarray] | None
    avg_profit: dict[str, np.ndarray] | None
    profit_stderr: dict[str, np.ndarray] | None
    crossing_step: int | None


def _collect_exact(config: ExperimentConfig, model_class: ModelClass) -> _RunStatistics:
    horizon = config.horizon
    loss = config.loss.build(model_class.alphabet) if config.loss else None
    mask = config.loss.mask(horizon) if config.loss else None
    strategies = {
        "informed": model_class.models[config.truth_index],
        "mixture": MixtureSource(model_class),
    }
    labels = [s for s in SCHEMES if s in config.schemes]
    sources = [strategies[lab] for lab in labels]

    kl = np.zeros(horizon)
    sq = np.zeros(horizon)
    errors = {lab: np.zeros(horizon) for lab in labels}
    losses = {lab: np.zeros(horizon) for lab in labels} if loss else None

    def visit(node) -> None:
        k = node.step - 1
        kl[k] += node.truth_prob * step_kl(node.truth_cond, node.mixture_cond)
        sq[k] += node.truth_prob * step_sq(node.truth_cond, node.mixture_cond)
        for lab, cond in zip(labels, node.extra_conds):
            predicted = argmax_lowest(cond)
            errors[lab][k] += node.truth_prob * (1.0 - node.truth_cond[predicted])
            if loss is not None and (mask is None or mask[k]):
                action = argmin_lowest(loss.expected_losses(cond))
                realized = sum(
                    node.truth_cond[x] * loss.table[x][action]
                    for x in range(loss.num_outcomes)
                )
                losses[lab][k] += node.truth_prob * realized

    walk_support(
        model_class,
        config.truth_index,
        horizon,
        visit,
        budget=config.enumeration_budget,
        extra_sources=sources,
    )

    both = set(labels) == set(SCHEMES)
    return _RunStatistics(
        kl=_Series.exact(kl),
        sq=_Series.exact(sq),
        errors={lab: _Series.exact(errors[lab]) for lab in labels},
        error_excess=_Series.exact(errors["mixture"] - errors["informed"]) if both else None,
        losses={lab: _Series.exact(losses[lab]) for lab in labels} if losses else None,
        loss_excess=_Series.exact(losses["mixture"] - losses["informed"])
        if losses and both
        else None,
        per_step_kl=kl,
        per_step_errors=errors,
        per_step_losses=losses,
        avg_profit=None,
        profit_stderr=None,
        crossing_step=None,
    )


def _collect_monte_carlo(
    config: ExperimentConfig, model_class: ModelClass
) -> _RunStatistics:
    horizon = config.horizon
    loss = config.loss.build(model_class.alphabet) if config.loss else None
    mask = config.loss.mask(horizon) if config.loss else None
    game = config.betting.build(model_class.alphabet) if config.betting else None
    strategies = {
        "informed": model_class.models[config.truth_index],
        "mixture": MixtureSource(model_class),
    }
    labels = [s for s in SCHEMES if s in config.schemes]

    stats = sample_path_statistics(
        model_class,
        config.truth_index,
        horizon,
        config.trials,
        config.seed,
        {lab: strategies[lab] for lab in labels},
        loss_table=loss.table if loss else None,
        active_steps=mask,
        profit_table=game.profit_table() if game else None,
        collect_info=True,
    )

    both = set(labels) == set(SCHEMES)
    avg_profit = None
    profit_stderr = None
    crossing = None
    if game is not None:
        steps = np.arange(1, horizon + 1, dtype=float)
        avg_profit = {}
        profit_stderr = {}
        for lab in labels:
            cum, err = cumulative_mean_and_stderr(stats.profits[lab])
            avg_profit[lab] = cum / steps
            profit_stderr[lab] = err / steps
        if "mixture" in avg_profit:
            positive = np.nonzero(avg_profit["mixture"] > 0.0)[0]
            crossing = int(positive[0]) + 1 if positive.size else None

    return _RunStatistics(
        kl=_Series.sampled(stats.kl),
        sq=_Series.sampled(stats.sq),
        errors={lab: _Series.sampled(stats.errors[lab]) for lab in labels},
        error_excess=_Series.sampled(stats.errors["mixture"] - stats.errors["informed"])
        if both
        else None,
        losses={lab: _Series.sampled(stats.losses[lab]) for lab in labels}
        if stats.losses
        else None,
        loss_excess=_Series.sampled(stats.losses["mixture"] - stats.losses["informed"])
        if stats.losses and both
        else None,
        per_step_kl=stats.kl.mean(axis=0),
        per_step_errors={lab: stats.errors[lab].mean(axis=0) for lab in labels},
        per_step_losses={lab: stats.losses[lab].mean(axis=0) for lab in labels}
        if stats.losses
        else None,
        avg_profit=avg_profit,
        profit_stderr=profit_stderr,
        crossing_step=crossing,
    )


# ---------------------------------------------------------------------------
# the runner
# ---------------------------------------------------------------------------

def run(config: ExperimentConfig) -> BoundReport:
    """Execute one experiment and evaluate every applicable bound check.

    Deterministic given the config, including its seed.
    """
    config.validate()
    model_class = config.build_model_class()
    tol = DEFAULT_TOLERANCES
    exact = config.mode == "exact"
    stats = _collect_exact(config, model_class) if exact else _collect_monte_carlo(config, model_class)

    horizon = config.horizon
    entropy_bound = model_class.entropy_bound(config.truth_index)
    labels = [s for s in SCHEMES if s in config.schemes]
    loss = config.loss.build(model_class.alphabet) if config.loss else None
    effective_loss = loss
    if loss is not None and config.loss.mask(horizon) is not None:
        # masked steps contribute exactly zero loss, so the declared range
        # must be widened to contain 0 before the bound formula applies
        lo = min(loss.l_min, 0.0)
        hi = max(loss.l_min + loss.l_delta, 0.0)
        effective_loss = LossMatrix(loss.table, l_min=lo, l_delta=hi - lo)
    game = config.betting.build(model_class.alphabet) if config.betting else None

    report = BoundReport(mode=config.mode, horizon=horizon)
    rows = report.rows

    # allowance: exact mode uses fixed tolerances, MC mode three standard errors
    def allowance(sigma: float, base: float) -> float:
        if exact:
            return base
        return 3.0 * sigma + tol.mc_roundoff

    kl = stats.kl
    sq = stats.sq
    tight = np.zeros(horizon)
    loose = np.zeros(horizon)
    informed_errors = stats.errors.get("informed")
    for k in range(horizon):
        if informed_errors is not None:
            b = error_excess_bound(
                max(float(informed_errors.cumulative[k]), 0.0), max(float(kl.cumulative[k]), 0.0)
            )
            tight[k], loose[k] = b.tight, b.loose

    lb = np.zeros(horizon)
    informed_losses = stats.losses.get("informed") if stats.losses else None
    if informed_losses is not None:
        for k in range(horizon):
            lb[k] = loss_bound(
                float(informed_losses.cumulative[k]),
                k + 1,
                max(float(kl.cumulative[k]), 0.0),
                effective_loss,
            )

    # ---- per-step rows ----
    for k in range(horizon):
        step = k + 1
        rows.append(ReportRow(step, "", "step_kl", float(stats.per_step_kl[k])))
        rows.append(
            ReportRow(
                step,
                "",
                "cum_kl",
                float(kl.cumulative[k]),
                entropy_bound,
                entropy_bound - float(kl.cumulative[k]),
            )
        )
        rows.append(
            ReportRow(
                step,
                "",
                "cum_sq",
                float(sq.cumulative[k]),
                float(kl.cumulative[k]),
                float(kl.cumulative[k] - sq.cumulative[k]),
            )
        )
        if not exact:
            rows.append(ReportRow(step, "", "cum_kl_stderr", float(kl.stderr[k])))
            rows.append(ReportRow(step, "", "cum_sq_stderr", float(sq.stderr[k])))
        for lab in labels:
            series = stats.errors[lab]
            rows.append(
                ReportRow(step, lab, "step_error", float(stats.per_step_errors[lab][k]))
            )
            bound = None
            slack = None
            if lab == "mixture" and informed_errors is not None:
                bound = float(informed_errors.cumulative[k] + tight[k])
                slack = bound - float(series.cumulative[k])
            rows.append(
                ReportRow(step, lab, "cum_errors", float(series.cumulative[k]), bound, slack)
            )
            if not exact:
                rows.append(ReportRow(step, lab, "cum_errors_stderr", float(series.stderr[k])))
        if stats.losses:
            for lab in labels:
                series = stats.losses[lab]
                rows.append(
                    ReportRow(step, lab, "step_loss", float(stats.per_step_losses[lab][k]))
                )
                bound = None
                slack = None
                if lab == "mixture" and informed_losses is not None:
                    bound = float(informed_losses.cumulative[k] + lb[k])
                    slack = bound - float(series.cumulative[k])
                rows.append(
                    ReportRow(step, lab, "cum_loss", float(series.cumulative[k]), bound, slack)
                )
                if not exact:
                    rows.append(
                        ReportRow(step, lab, "cum_loss_stderr", float(series.stderr[k]))
                    )
        if stats.avg_profit:
            for lab in labels:
                rows.append(
                    ReportRow(step, lab, "avg_profit", float(stats.avg_profit[lab][k]))
                )
                rows.append(
                    ReportRow(
                        step, lab, "avg_profit_stderr", float(stats.profit_stderr[lab][k])
                    )
                )

    # ---- summary verdicts ----
    margins = [
        entropy_bound - float(kl.cumulative[k]) + allowance(float(kl.stderr[k]), tol.bound)
        for k in range(horizon)
    ]
    rows.append(
        _verdict_row(
            "entropy_upper_bound", "", float(kl.cumulative[-1]), entropy_bound, margins
        )
    )
    rows.append(
        _verdict_row(
            "entropy_monotone",
            "",
            float(np.min(stats.per_step_kl)),
            0.0,
            [float(np.min(stats.per_step_kl)) + tol.bound],
        )
    )
    margins = [
        float(kl.cumulative[k] - sq.cumulative[k])
        + allowance(float(kl.stderr[k]) + float(sq.stderr[k]), tol.bound)
        for k in range(horizon)
    ]
    rows.append(
        _verdict_row(
            "sq_within_entropy",
            "",
            float(sq.cumulative[-1]),
            float(kl.cumulative[-1]),
            margins,
        )
    )

    if stats.error_excess is not None:
        excess = stats.error_excess
        margins = [
            float(excess.cumulative[k]) + allowance(float(excess.stderr[k]), tol.optimality)
            for k in range(horizon)
        ]
        rows.append(
            _verdict_row(
                "informed_error_optimality", "mixture", float(excess.cumulative[-1]), 0.0, margins
            )
        )
        margins = []
        for k in range(horizon):
            sigma = 0.0
            if not exact:
                d_e, d_h = _error_bound_partials(
                    float(informed_errors.cumulative[k]), float(kl.cumulative[k])
                )
                sigma = (
                    float(excess.stderr[k])
                    + d_e * float(informed_errors.stderr[k])
                    + d_h * float(kl.stderr[k])
                )
            margins.append(
                tight[k] - float(excess.cumulative[k]) + allowance(sigma, tol.bound)
            )
        rows.append(
            _verdict_row(
                "error_excess_within_bound",
                "mixture",
                float(excess.cumulative[-1]),
                float(tight[-1]),
                margins,
            )
        )
        rows.append(
            _verdict_row(
                "error_bounds_ordered",
                "mixture",
                float(tight[-1]),
                float(loose[-1]),
                [float(loose[k] - tight[k]) + tol.bound for k in range(horizon)],
            )
        )
    else:
        rows.append(_not_applicable("informed_error_optimality", "mixture"))
        rows.append(_not_applicable("error_excess_within_bound", "mixture"))
        rows.append(_not_applicable("error_bounds_ordered", "mixture"))

    if stats.losses and stats.loss_excess is not None:
        excess = stats.loss_excess
        margins = [
            float(excess.cumulative[k]) + allowance(float(excess.stderr[k]), tol.optimality)
            for k in range(horizon)
        ]
        rows.append(
            _verdict_row(
                "informed_loss_optimality", "mixture", float(excess.cumulative[-1]), 0.0, margins
            )
        )
        margins = []
        for k in range(horizon):
            sigma = 0.0
            if not exact:
                shifted = max(
                    float(informed_losses.cumulative[k]) - (k + 1) * effective_loss.l_min, 0.0
                )
                d_l, d_h = _loss_bound_partials(
                    shifted, float(kl.cumulative[k]), effective_loss.l_delta
                )
                sigma = (
                    float(excess.stderr[k])
                    + d_l * float(informed_losses.stderr[k])
                    + d_h * float(kl.stderr[k])
                )
            margins.append(lb[k] - float(excess.cumulative[k]) + allowance(sigma, tol.bound))
        rows.append(
            _verdict_row(
                "loss_excess_within_bound",
                "mixture",
                float(excess.cumulative[-1]),
                float(lb[-1]),
                margins,
            )
        )
    elif config.loss is not None:
        rows.append(_not_applicable("informed_loss_optimality", "mixture"))
        rows.append(_not_applicable("loss_excess_within_bound", "mixture"))

    if game is not None and stats.avg_profit is not None:
        informed_avg = stats.avg_profit.get("informed")
        final_avg = float(informed_avg[-1]) if informed_avg is not None else 0.0
        if informed_avg is None or final_avg <= 0.0:
            rows.append(_not_applicable("winning_zone_within_bound", "mixture"))
        else:
            # evaluated with the stabilized (largest-horizon) informed average
            bound = winning_zone_bound(game.p_delta, final_avg, entropy_bound)
            if stats.crossing_step is not None:
                rows.append(
                    _verdict_row(
                        "winning_zone_within_bound",
                        "mixture",
                        float(stats.crossing_step),
                        bound,
                        [bound - float(stats.crossing_step)],
                    )
                )
            elif horizon >= bound:
                rows.append(
                    ReportRow(
                        None,
                        "mixture",
                        "winning_zone_within_bound",
                        math.inf,
                        bound,
                        -math.inf,
                        "FAIL",
                    )
                )
            else:
                # horizon too short to witness the crossing either way
                rows.append(_not_applicable("winning_zone_within_bound", "mixture"))

    return report


# ---------------------------------------------------------------------------
# randomized verification of the quadratic-vs-entropy inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InequalitySuiteReport:
    total_pairs: int
    violations: int
    worst_slack: float

    @property
    def all_hold(self) -> bool:
        return self.violations == 0


def verify_inequality_suite(
    samples: int, max_symbols: int, seed: int
) -> InequalitySuiteReport:
    """Check sum((p-q)**2) <= sum(p*ln(p/q)) on random simplex pairs.

    For each vector size from 2 to max_symbols, draws `samples` independent
    uniform-simplex pairs, plus degenerate identical pairs and pairs sharing
    a zeroed coordinate (where the zero-times-log convention applies).
    Returns the violation count (expected 0) and the smallest observed
    slack over pairs with a finite right-hand side.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if max_symbols < 2:
        raise ValueError("max_symbols must be >= 2")
    rng = np.random.default_rng(seed)
    tol = DEFAULT_TOLERANCES.entropy_inequality
    total = 0
    violations = 0
    worst = math.inf

    for size in range(2, max_symbols + 1):
        p = rng.dirichlet(np.ones(size), size=samples)
        q = rng.dirichlet(np.ones(size), size=samples)
        # degenerate identical pairs, and pairs with a shared zero coordinate
        extra = min(128, samples)
        same = rng.dirichlet(np.ones(size), size=extra)
        p = np.vstack([p, same])
        q = np.vstack([q, same])
        if size > 2:
            zp = rng.dirichlet(np.ones(size - 1), size=extra)
            zq = rng.dirichlet(np.ones(size - 1), size=extra)
            pad = np.zeros((extra, 1))
            p = np.vstack([p, np.hstack([pad, zp])])
            q = np.vstack([q, np.hstack([pad, zq])])

        lhs = ((p - q) ** 2).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0.0, p * np.log(p / q), 0.0)
        rhs = terms.sum(axis=1)
        total += len(lhs)
        violations += int(np.sum(lhs > rhs + tol))
        finite = np.isfinite(rhs)
        if np.any(finite):
            worst = min(worst, float(np.min(rhs[finite] - lhs[finite])))

    return InequalitySuiteReport(
        total_pairs=total, violations=violations, worst_slack=worst
    )


# ---------------------------------------------------------------------------
# per-prefix enumeration dump (debugging aid)
# ---------------------------------------------------------------------------

def enumerate_rows(config: ExperimentConfig) -> str:
    """CSV of every reachable prefix with its conditionals and predictions."""
    config.validate()
    model_class = config.build_model_class()
    strategies = [
        model_class.models[config.truth_index],
        MixtureSource(model_class),
    ]
    lines = [
        "k,prefix,truth_prob,truth_cond,mixture_cond,posterior,step_kl,step_sq,"
        "predicted_informed,predicted_mixture"
    ]

    def join(vec) -> str:
        return ";".join(_fmt(float(v)) for v in vec)

    def visit(node) -> None:
        posterior = node.mixture_state.posterior_weights()
        lines.append(
            ",".join(
                (
                    str(node.step),
                    "".join(str(s) for s in node.prefix),
                    _fmt(node.truth_prob),
                    join(node.truth_cond),
                    join(node.mixture_cond),
                    join(posterior),
                    _fmt(step_kl(node.truth_cond, node.mixture_cond)),
                    _fmt(step_sq(node.truth_cond, node.mixture_cond)),
                    str(argmax_lowest(node.extra_conds[0])),
                    str(argmax_lowest(node.extra_conds[1])),
                )
            )
        )

    walk_support(
        model_class,
        config.truth_index,
        config.horizon,
        visit,
        budget=config.enumeration_budget,
        extra_sources=strategies,
    )
    return "\n".join(lines) + "\n"
