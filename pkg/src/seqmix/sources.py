"""Finite alphabets, symbol sequences, and next-symbol probability sources.

A source exposes the conditional probability of the next symbol given the
prefix observed so far.  Joint probabilities are chained products of those
conditionals, accumulated in log space because linear-space products of
length-n sequences underflow near n = 700.

Three concrete families are provided: i.i.d. categorical draws, order-m
Markov chains, and deterministic periodic repeaters (probability one on a
single infinite sequence).
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import Iterable, Sequence as SequenceABC

import numpy as np

from .tolerances import DEFAULT_TOLERANCES


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol set; symbols are the dense indices 0 .. size-1."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError(f"alphabet needs at least 2 symbols, got {self.size}")

    def symbols(self) -> range:
        return range(self.size)

    def validate_symbol(self, symbol: int) -> None:
        if not 0 <= symbol < self.size:
            raise ValueError(
                f"symbol {symbol} out of range for alphabet of size {self.size}"
            )


@dataclass(frozen=True)
class Sequence:
    """Immutable string of symbol indices over a fixed alphabet."""

    alphabet: Alphabet
    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        for s in self.symbols:
            self.alphabet.validate_symbol(s)

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "Sequence":
        return cls(alphabet, ())

    @classmethod
    def of(cls, alphabet: Alphabet, symbols: Iterable[int]) -> "Sequence":
        return cls(alphabet, tuple(symbols))

    def extended(self, symbol: int) -> "Sequence":
        return Sequence(self.alphabet, self.symbols + (symbol,))

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __str__(self) -> str:
        return "".join(str(s) for s in self.symbols)


def _as_probability_vector(values, size: int, what: str) -> np.ndarray:
    vec = np.asarray(values, dtype=float)
    if vec.shape != (size,):
        raise ValueError(f"{what} must have shape ({size},), got {vec.shape}")
    if np.any(vec < 0.0):
        raise ValueError(f"{what} has negative entries")
    if abs(float(vec.sum()) - 1.0) > DEFAULT_TOLERANCES.normalization:
        raise ValueError(f"{what} sums to {vec.sum()!r}, expected 1")
    return vec


class Source(abc.ABC):
    """Conditional next-symbol distribution over a finite alphabet.

    Subclasses implement a small incremental-state protocol so that walking
    a sequence symbol by symbol costs O(1) per step instead of re-reading
    the whole prefix.  All public operations are derived from it.
    """

    @property
    @abc.abstractmethod
    def alphabet(self) -> Alphabet: ...

    @abc.abstractmethod
    def initial_state(self):
        """Evaluation state at the empty prefix."""

    @abc.abstractmethod
    def next_state(self, state, symbol: int):
        """State after observing one more symbol."""

    @abc.abstractmethod
    def state_conditional_vector(self, state) -> tuple[float, ...]:
        """Next-symbol probabilities at the given state, as a length-N tuple."""

    # ------------------------------------------------------------------
    # derived operations
    # ------------------------------------------------------------------
    def _state_at(self, prefix) -> object:
        state = self.initial_state()
        for s in prefix:
            state = self.next_state(state, s)
        return state

    def conditional_vector(self, prefix) -> tuple[float, ...]:
        """Probabilities of every next symbol after `prefix`."""
        return self.state_conditional_vector(self._state_at(prefix))

    def conditional(self, prefix, next_symbol: int) -> float:
        """Probability that `next_symbol` follows `prefix`."""
        self.alphabet.validate_symbol(next_symbol)
        return self.conditional_vector(prefix)[next_symbol]

    def log_joint(self, sequence) -> float:
        """log probability that an infinite sequence starts with `sequence`.

        Returns 0.0 for the empty prefix and -inf when any chained
        conditional is exactly zero.
        """
        state = self.initial_state()
        total = 0.0
        for s in sequence:
            self.alphabet.validate_symbol(s)
            p = self.state_conditional_vector(state)[s]
            if p <= 0.0:
                return -math.inf
            total += math.log(p)
            state = self.next_state(state, s)
        return total

    def joint(self, sequence) -> float:
        """Probability that an infinite sequence starts with `sequence`."""
        return math.exp(self.log_joint(sequence))

    def sample(self, n: int, rng: np.random.Generator) -> Sequence:
        """Draw a length-n realization; deterministic given the generator state."""
        if n < 0:
            raise ValueError("sample length must be nonnegative")
        state = self.initial_state()
        out = []
        for _ in range(n):
            cond = self.state_conditional_vector(state)
            u = rng.random()
            acc = 0.0
            chosen = len(cond) - 1
            for a, p in enumerate(cond):
                acc += p
                if u < acc:
                    chosen = a
                    break
            out.append(chosen)
            state = self.next_state(state, chosen)
        return Sequence(self.alphabet, tuple(out))


class IidCategorical(Source):
    """Independent draws from one fixed categorical distribution."""

    def __init__(self, probabilities) -> None:
        vec = np.asarray(probabilities, dtype=float)
        self._alphabet = Alphabet(vec.shape[0] if vec.ndim == 1 else 0)
        self._probs = _as_probability_vector(vec, self._alphabet.size, "probabilities")
        self._cond = tuple(float(p) for p in self._probs)

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def probabilities(self) -> np.ndarray:
        return self._probs.copy()

    def initial_state(self):
        return None

    def next_state(self, state, symbol: int):
        return None

    def state_conditional_vector(self, state) -> tuple[float, ...]:
        return self._cond

    def __repr__(self) -> str:
        return f"IidCategorical({list(self._probs)})"


class MarkovOrderM(Source):
    """Order-m Markov chain with a row-stochastic transition table.

    The table has N**m rows; row index encodes the last m symbols
    (c_1 .. c_m, oldest first) as the base-N integer c_1*N**(m-1) + ... + c_m.
    Prefixes shorter than m draw i.i.d. from the initial distribution, which
    keeps every conditional exactly normalized through the warm-up steps.
    """

    def __init__(self, order: int, transitions, initial) -> None:
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        table = np.asarray(transitions, dtype=float)
        init = np.asarray(initial, dtype=float)
        if init.ndim != 1:
            raise ValueError("initial distribution must be a vector")
        n = init.shape[0]
        self._alphabet = Alphabet(n)
        self._initial = _as_probability_vector(init, n, "initial distribution")
        if table.shape != (n**order, n):
            raise ValueError(
                f"transition table must have shape ({n ** order}, {n}), got {table.shape}"
            )
        for i, row in enumerate(table):
            _as_probability_vector(row, n, f"transition row {i}")
        self.order = order
        self._table = table
        self._rows = tuple(tuple(float(p) for p in row) for row in table)
        self._init_cond = tuple(float(p) for p in self._initial)

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def transitions(self) -> np.ndarray:
        return self._table.copy()

    @property
    def initial(self) -> np.ndarray:
        return self._initial.copy()

    def row_index(self, context: SequenceABC[int]) -> int:
        """Base-N encoding of an m-symbol context, oldest symbol first."""
        idx = 0
        for s in context:
            idx = idx * self._alphabet.size + s
        return idx

    def initial_state(self):
        return ()

    def next_state(self, state, symbol: int):
        if len(state) < self.order:
            return state + (symbol,)
        return state[1:] + (symbol,)

    def state_conditional_vector(self, state) -> tuple[float, ...]:
        if len(state) < self.order:
            return self._init_cond
        return self._rows[self.row_index(state)]

    def __repr__(self) -> str:
        return f"MarkovOrderM(order={self.order}, alphabet={self._alphabet.size})"


class DeterministicPeriodic(Source):
    """Probability one on the infinite repetition of a fixed pattern.

    The conditional at position k depends only on k mod len(pattern), so it
    is a well-normalized 0/1 vector for every prefix, including prefixes the
    source itself would never generate; the chained joint of any off-pattern
    prefix is exactly 0.
    """

    def __init__(self, pattern: Sequence) -> None:
        if len(pattern) == 0:
            raise ValueError("pattern must be nonempty")
        self._alphabet = pattern.alphabet
        self.pattern = tuple(pattern.symbols)

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    def initial_state(self):
        return 0

    def next_state(self, state, symbol: int):
        return (state + 1) % len(self.pattern)

    def state_conditional_vector(self, state) -> tuple[float, ...]:
        expected = self.pattern[state]
        return tuple(1.0 if a == expected else 0.0 for a in range(self._alphabet.size))

    def __repr__(self) -> str:
        return f"DeterministicPeriodic({list(self.pattern)})"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial generator: PCG64 keyed by SeedSequence(seed).spawn_key=(trial,).

    This is the stream-splitting rule used by every Monte-Carlo entry point,
    so trial i of a run is reproducible independently of how many trials run
    or in which order.
    """
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
    )
