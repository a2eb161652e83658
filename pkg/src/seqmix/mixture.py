"""Weighted mixture of candidate sources: marginals, conditionals, posteriors.

The mixture assigns a prefix the weighted sum of the member marginals, so it
multiplicatively dominates every member: mixture(x) >= w_i * model_i(x).
All prefix marginals are tracked in log space with max-subtracted
log-sum-exp, since member marginals drift hundreds of nats apart on long
prefixes.  Members that hit a zero conditional stay in the state with
posterior weight exactly 0, keeping model indices stable for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence as SequenceABC

import numpy as np

from .sources import (
    Alphabet,
    DeterministicPeriodic,
    IidCategorical,
    MarkovOrderM,
    Source,
)
from .tolerances import DEFAULT_TOLERANCES


class PrefixImpossibleError(ValueError):
    """Raised when every member assigns the observed prefix probability 0."""


def _logsumexp(values) -> float:
    """log(sum(exp(v))) over a small iterable, stable under -inf entries."""
    m = max(values)
    if m == -math.inf:
        return -math.inf
    return m + math.log(sum(math.exp(v - m) for v in values))


class ModelClass:
    """Nonempty finite set of candidate sources with a normalized prior."""

    def __init__(self, models: SequenceABC[Source], weights) -> None:
        if len(models) == 0:
            raise ValueError("model class must be nonempty")
        alphabet = models[0].alphabet
        for m in models:
            if m.alphabet != alphabet:
                raise ValueError("all models must share one alphabet")
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(models),):
            raise ValueError(
                f"weights must have shape ({len(models)},), got {w.shape}"
            )
        if np.any(w <= 0.0):
            raise ValueError("every prior weight must be strictly positive")
        if abs(float(w.sum()) - 1.0) > DEFAULT_TOLERANCES.normalization:
            raise ValueError(f"prior weights sum to {w.sum()!r}, expected 1")
        self.models: tuple[Source, ...] = tuple(models)
        self.alphabet: Alphabet = alphabet
        self.weights: np.ndarray = w
        self.log_weights: tuple[float, ...] = tuple(math.log(x) for x in w)

    @classmethod
    def uniform(cls, models: SequenceABC[Source]) -> "ModelClass":
        k = len(models)
        if k == 0:
            raise ValueError("model class must be nonempty")
        return cls(models, np.full(k, 1.0 / k))

    @classmethod
    def by_description_length(cls, models: SequenceABC[Source]) -> "ModelClass":
        return cls(models, weight_by_description_length(models))

    def __len__(self) -> int:
        return len(self.models)

    def log_weight_of(self, index: int) -> float:
        return self.log_weights[index]

    def entropy_bound(self, truth_index: int) -> float:
        """ln(1 / prior weight of the given member), the a-priori cap on the
        cumulative relative entropy accumulated against that member."""
        return -self.log_weights[truth_index]


@dataclass(frozen=True)
class MixtureState:
    """Mixture evaluation state after consuming a prefix.

    `log_marginals[i]` is the log prefix probability under member i (-inf
    allowed), `log_prob` the log prefix probability under the mixture, and
    `model_states` the members' own incremental evaluation states.
    """

    model_class: ModelClass
    depth: int
    model_states: tuple
    log_marginals: tuple[float, ...]
    log_prob: float

    @classmethod
    def initial(cls, model_class: ModelClass) -> "MixtureState":
        k = len(model_class)
        return cls(
            model_class=model_class,
            depth=0,
            model_states=tuple(m.initial_state() for m in model_class.models),
            log_marginals=(0.0,) * k,
            log_prob=0.0,
        )

    def member_conditionals(self) -> tuple[tuple[float, ...], ...]:
        return tuple(
            m.state_conditional_vector(s)
            for m, s in zip(self.model_class.models, self.model_states)
        )

    def posterior_weights(self) -> np.ndarray:
        """Prior weights reweighted by each member's prefix likelihood."""
        if self.log_prob == -math.inf:
            raise PrefixImpossibleError(
                f"prefix of length {self.depth} has probability 0 under every model"
            )
        lw = self.model_class.log_weights
        return np.array(
            [
                math.exp(lw[i] + self.log_marginals[i] - self.log_prob)
                for i in range(len(lw))
            ]
        )

    def conditional_vector(self) -> tuple[float, ...]:
        """Mixture next-symbol probabilities: posterior-weighted member mix."""
        if self.log_prob == -math.inf:
            raise PrefixImpossibleError(
                f"prefix of length {self.depth} has probability 0 under every model"
            )
        lw = self.model_class.log_weights
        lm = self.log_marginals
        lp = self.log_prob
        conds = self.member_conditionals()
        k = len(conds)
        post = [math.exp(lw[i] + lm[i] - lp) for i in range(k)]
        n = self.model_class.alphabet.size
        return tuple(sum(post[i] * conds[i][a] for i in range(k)) for a in range(n))

    def conditional(self, next_symbol: int) -> float:
        self.model_class.alphabet.validate_symbol(next_symbol)
        return self.conditional_vector()[next_symbol]

    def advance(self, observed: int) -> "MixtureState":
        """State after one more observed symbol (new value, no mutation)."""
        self.model_class.alphabet.validate_symbol(observed)
        models = self.model_class.models
        new_states = []
        new_lm = []
        for m, s, lm in zip(models, self.model_states, self.log_marginals):
            p = m.state_conditional_vector(s)[observed]
            new_lm.append(lm + math.log(p) if p > 0.0 else -math.inf)
            new_states.append(m.next_state(s, observed))
        lw = self.model_class.log_weights
        log_prob = _logsumexp([lw[i] + new_lm[i] for i in range(len(models))])
        return MixtureState(
            model_class=self.model_class,
            depth=self.depth + 1,
            model_states=tuple(new_states),
            log_marginals=tuple(new_lm),
            log_prob=log_prob,
        )

    def dominance_gaps(self) -> np.ndarray:
        """log mixture(prefix) - (log w_i + log model_i(prefix)), all >= 0."""
        lw = self.model_class.log_weights
        return np.array(
            [
                self.log_prob - (lw[i] + self.log_marginals[i])
                for i in range(len(lw))
            ]
        )


class MixtureSource(Source):
    """The mixture itself, packaged as a Source.

    This lets one predictor / action-scheme implementation serve the informed
    strategy, the mixture strategy, and arbitrary custom strategies alike.
    Its incremental evaluation state is a MixtureState.
    """

    def __init__(self, model_class: ModelClass) -> None:
        self.model_class = model_class

    @property
    def alphabet(self) -> Alphabet:
        return self.model_class.alphabet

    def initial_state(self):
        return MixtureState.initial(self.model_class)

    def next_state(self, state: MixtureState, symbol: int):
        return state.advance(symbol)

    def state_conditional_vector(self, state: MixtureState) -> tuple[float, ...]:
        return state.conditional_vector()

    def __repr__(self) -> str:
        return f"MixtureSource({len(self.model_class)} models)"


_FAMILY_TAG_BITS = 2  # ceil(log2(number of concrete families))


def description_length(model: Source) -> float:
    """Serialized size of a model in bits: family tag, 32 bits per real
    parameter, bit_length of each integer parameter, and ceil(log2 N) per
    pattern symbol.  Simpler models get shorter codes, hence larger weights.
    """
    n = model.alphabet.size
    if isinstance(model, IidCategorical):
        return _FAMILY_TAG_BITS + 32.0 * n
    if isinstance(model, MarkovOrderM):
        reals = n**model.order * n + n
        return _FAMILY_TAG_BITS + model.order.bit_length() + 32.0 * reals
    if isinstance(model, DeterministicPeriodic):
        length = len(model.pattern)
        bits_per_symbol = (n - 1).bit_length()
        return _FAMILY_TAG_BITS + length.bit_length() + length * bits_per_symbol
    raise TypeError(f"no description-length rule for {type(model).__name__}")


def weights_from_description_lengths(lengths) -> np.ndarray:
    """Normalize 2**(-length) into a weight vector, shifted so the shortest
    description carries no exponent; plays the role of the normalization
    constant over the class."""
    dl = np.asarray(lengths, dtype=float)
    if dl.size == 0:
        raise ValueError("need at least one description length")
    shifted = np.exp2(-(dl - dl.min()))
    if np.any(shifted == 0.0):
        raise ValueError(
            "description-length spread exceeds float range; weights would not stay positive"
        )
    return shifted / shifted.sum()


def weight_by_description_length(models: SequenceABC[Source]) -> np.ndarray:
    """Prior weights proportional to 2**(-description_length(model))."""
    return weights_from_description_lengths([description_length(m) for m in models])
