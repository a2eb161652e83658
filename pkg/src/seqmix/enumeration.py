"""Depth-first walk over the support of the true source, for exact sums.

Expected per-step quantities (relative entropy, errors, losses) are sums of
`truth_prob(prefix) * f(prefix)` over all prefixes the true source can
produce.  The walker visits exactly those prefixes, threading the mixture
posterior and any extra strategies' evaluation states along, so callers get
every conditional they need at each node without re-reading prefixes.

Zero-probability branches are pruned, which is what makes deterministic
truths enumerable to long horizons: their support tree is a single path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence as SequenceABC

from .mixture import MixtureSource, MixtureState, ModelClass
from .sources import Source

DEFAULT_ENUMERATION_BUDGET = 2_000_000


class EnumerationBudgetError(RuntimeError):
    """Enumeration too large for the configured node budget."""

    def __init__(self, visits: int, budget: int) -> None:
        super().__init__(
            f"enumeration too large: exceeded budget of {budget} node visits "
            f"after {visits}; use the Monte-Carlo path for this configuration"
        )
        self.visits = visits
        self.budget = budget


@dataclass(frozen=True)
class PrefixNode:
    """One visited prefix: step index k (1-based), the prefix x_{<k} itself,
    its probability under the true source, and the next-symbol conditionals
    of the truth, the mixture, and each extra strategy."""

    step: int
    prefix: tuple[int, ...]
    truth_prob: float
    truth_cond: tuple[float, ...]
    mixture_cond: tuple[float, ...]
    extra_conds: tuple[tuple[float, ...], ...]
    mixture_state: MixtureState


def walk_support(
    model_class: ModelClass,
    truth_index: int,
    horizon: int,
    visit: Callable[[PrefixNode], None],
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    extra_sources: SequenceABC[Source] = (),
) -> int:
    """Visit every prefix of positive truth probability up to the horizon.

    Children are explored in symbol order (depth-first preorder), so the
    visit order, and therefore any float accumulation done by `visit`, is
    deterministic.  Returns the number of nodes visited; raises
    EnumerationBudgetError as soon as that count would exceed `budget`.
    """
    if not 0 <= truth_index < len(model_class):
        raise ValueError(f"truth index {truth_index} outside class of size {len(model_class)}")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")

    # A mixture strategy over the same class is served from the walker's own
    # posterior instead of being tracked a second time.
    tracked: list[tuple[int, Source]] = []
    shortcut: dict[int, bool] = {}
    for i, src in enumerate(extra_sources):
        if isinstance(src, MixtureSource) and src.model_class is model_class:
            shortcut[i] = True
        else:
            shortcut[i] = False
            tracked.append((i, src))

    n_extra = len(extra_sources)
    visits = 0
    root = (
        1,
        (),
        1.0,
        MixtureState.initial(model_class),
        tuple(src.initial_state() for _, src in tracked),
    )
    stack = [root]
    while stack:
        step, prefix, truth_prob, mix_state, tracked_states = stack.pop()
        visits += 1
        if visits > budget:
            raise EnumerationBudgetError(visits, budget)

        member_conds = mix_state.member_conditionals()
        truth_cond = member_conds[truth_index]
        posterior = mix_state.posterior_weights()
        size = model_class.alphabet.size
        mixture_cond = tuple(
            sum(posterior[i] * member_conds[i][a] for i in range(len(member_conds)))
            for a in range(size)
        )
        extras: list[tuple[float, ...]] = [()] * n_extra
        for (orig, src), st in zip(tracked, tracked_states):
            extras[orig] = src.state_conditional_vector(st)
        for i in range(n_extra):
            if shortcut[i]:
                extras[i] = mixture_cond

        visit(
            PrefixNode(
                step=step,
                prefix=prefix,
                truth_prob=truth_prob,
                truth_cond=truth_cond,
                mixture_cond=mixture_cond,
                extra_conds=tuple(extras),
                mixture_state=mix_state,
            )
        )

        if step < horizon:
            # reversed so the stack pops children in increasing symbol order
            for a in range(size - 1, -1, -1):
                p = truth_cond[a]
                if p <= 0.0:
                    continue
                stack.append(
                    (
                        step + 1,
                        prefix + (a,),
                        truth_prob * p,
                        mix_state.advance(a),
                        tuple(
                            src.next_state(st, a)
                            for (_, src), st in zip(tracked, tracked_states)
                        ),
                    )
                )
    return visits
