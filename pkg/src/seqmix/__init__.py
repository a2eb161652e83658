"""Mixture prediction over finite alphabets with verifiable learning bounds.

The package builds a weighted mixture over a finite class of candidate
sources, predicts and acts from it, and measures, exactly at desk scale or
by seeded Monte-Carlo, how quickly its errors, losses, and betting profits
approach those of the scheme that knows the true source.
"""

from .decision import (
    BetRound,
    BettingGame,
    BettingReport,
    LossLedger,
    LossMatrix,
    act,
    expected_loss_exact,
    expected_loss_exact_multi,
    expected_loss_mc,
    loss_bound,
    simulate_betting,
    winning_zone_bound,
)
from .enumeration import (
    DEFAULT_ENUMERATION_BUDGET,
    EnumerationBudgetError,
    PrefixNode,
    walk_support,
)
from .harness import (
    BettingSpec,
    BoundReport,
    ConfigError,
    ExperimentConfig,
    InequalitySuiteReport,
    LossSpec,
    ModelSpec,
    ReportRow,
    enumerate_rows,
    run,
    verify_inequality_suite,
)
from .information import (
    InequalityCheck,
    InfoLedger,
    accumulate_exact,
    check_entropy_inequality,
    step_kl,
    step_sq,
)
from .mixture import (
    MixtureSource,
    MixtureState,
    ModelClass,
    PrefixImpossibleError,
    description_length,
    weight_by_description_length,
    weights_from_description_lengths,
)
from .montecarlo import argmax_lowest, argmin_lowest
from .prediction import (
    ArgmaxPredictor,
    ErrorLedger,
    ExcessErrorBound,
    error_excess_bound,
    expected_errors_exact,
    expected_errors_exact_multi,
    expected_errors_mc,
    informed_predictor,
    mixture_predictor,
    step_error,
)
from .sources import (
    Alphabet,
    DeterministicPeriodic,
    IidCategorical,
    MarkovOrderM,
    Sequence,
    Source,
    trial_rng,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "Alphabet",
    "ArgmaxPredictor",
    "BetRound",
    "BettingGame",
    "BettingReport",
    "BettingSpec",
    "BoundReport",
    "ConfigError",
    "DEFAULT_ENUMERATION_BUDGET",
    "DEFAULT_TOLERANCES",
    "DeterministicPeriodic",
    "EnumerationBudgetError",
    "ErrorLedger",
    "ExcessErrorBound",
    "ExperimentConfig",
    "IidCategorical",
    "InequalityCheck",
    "InequalitySuiteReport",
    "InfoLedger",
    "LossLedger",
    "LossMatrix",
    "LossSpec",
    "MarkovOrderM",
    "MixtureSource",
    "MixtureState",
    "ModelClass",
    "ModelSpec",
    "PrefixImpossibleError",
    "PrefixNode",
    "ReportRow",
    "Sequence",
    "Source",
    "Tolerances",
    "accumulate_exact",
    "act",
    "argmax_lowest",
    "argmin_lowest",
    "check_entropy_inequality",
    "description_length",
    "enumerate_rows",
    "error_excess_bound",
    "expected_errors_exact",
    "expected_errors_exact_multi",
    "expected_errors_mc",
    "expected_loss_exact",
    "expected_loss_exact_multi",
    "expected_loss_mc",
    "informed_predictor",
    "loss_bound",
    "mixture_predictor",
    "run",
    "simulate_betting",
    "step_error",
    "step_kl",
    "step_sq",
    "trial_rng",
    "verify_inequality_suite",
    "walk_support",
    "weight_by_description_length",
    "weights_from_description_lengths",
    "winning_zone_bound",
]
