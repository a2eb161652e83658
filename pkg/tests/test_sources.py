"""Alphabets, sequences, and the three concrete source families."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqmix import (
    Alphabet,
    DeterministicPeriodic,
    IidCategorical,
    MarkovOrderM,
    Sequence,
    trial_rng,
)

from helpers import all_prefixes, direct_joint


def seq(alphabet_size, symbols):
    return Sequence.of(Alphabet(alphabet_size), symbols)


class TestAlphabetAndSequence:
    def test_alphabet_rejects_trivial_sizes(self):
        with pytest.raises(ValueError):
            Alphabet(1)
        with pytest.raises(ValueError):
            Alphabet(0)

    def test_sequence_rejects_out_of_range_symbols(self):
        with pytest.raises(ValueError):
            seq(2, [0, 2])

    def test_sequence_roundtrip(self):
        s = seq(3, [0, 1, 2, 1])
        assert len(s) == 4
        assert list(s) == [0, 1, 2, 1]
        assert str(s) == "0121"
        assert s.extended(0).symbols == (0, 1, 2, 1, 0)


class TestConditionals:
    def test_iid_conditional_ignores_prefix(self):
        src = IidCategorical([0.5, 0.5])
        assert src.conditional(seq(2, []), 0) == 0.5
        assert src.conditional(seq(2, [1, 1, 0]), 0) == 0.5

    def test_periodic_continues_pattern(self):
        # pattern "ab" encoded as symbols 0, 1; after "ab" the next is 'a'
        src = DeterministicPeriodic(seq(2, [0, 1]))
        assert src.conditional(seq(2, [0, 1]), 0) == 1.0
        assert src.conditional(seq(2, [0, 1]), 1) == 0.0

    def test_markov_row_lookup(self):
        src = MarkovOrderM(1, [[0.9, 0.1], [0.2, 0.8]], [0.5, 0.5])
        assert src.conditional(seq(2, [0, 1]), 0) == 0.2
        assert src.conditional(seq(2, [1]), 1) == 0.8

    def test_markov_warmup_uses_initial_distribution(self):
        src = MarkovOrderM(2, np.full((4, 2), 0.5), [0.3, 0.7])
        assert src.conditional(seq(2, []), 1) == 0.7
        assert src.conditional(seq(2, [0]), 1) == 0.7
        assert src.conditional(seq(2, [0, 1]), 1) == 0.5

    def test_symbol_out_of_range_is_an_input_error(self):
        src = IidCategorical([0.5, 0.5])
        with pytest.raises(ValueError):
            src.conditional(seq(2, []), 2)

    def test_periodic_conditionals_are_exactly_zero_or_one(self):
        src = DeterministicPeriodic(seq(3, [0, 2]))
        for prefix in all_prefixes(3, 3):
            for value in src.conditional_vector(prefix):
                assert value in (0.0, 1.0)


class TestJoint:
    def test_uniform_three_symbol_pair(self):
        src = IidCategorical([1 / 3, 1 / 3, 1 / 3])
        assert src.joint(seq(3, [0, 2])) == pytest.approx(1 / 9, abs=1e-15)

    def test_empty_sequence_has_probability_one(self):
        for src in (
            IidCategorical([0.2, 0.8]),
            MarkovOrderM(1, [[0.9, 0.1], [0.2, 0.8]], [0.5, 0.5]),
            DeterministicPeriodic(seq(2, [1])),
        ):
            assert src.joint(seq(2, [])) == 1.0
            assert src.log_joint(seq(2, [])) == 0.0

    def test_off_pattern_prefix_has_probability_zero(self):
        src = DeterministicPeriodic(seq(2, [0, 1]))
        assert src.joint(seq(2, [1, 0])) == 0.0
        assert src.log_joint(seq(2, [1, 0])) == -math.inf

    def test_periodic_chain_rule_is_exact(self):
        src = DeterministicPeriodic(seq(2, [0, 1]))
        for prefix in all_prefixes(2, 4):
            expected = direct_joint(src, prefix)
            assert src.joint(Sequence.of(src.alphabet, prefix)) == expected
            assert expected in (0.0, 1.0)

    def test_long_sequence_stays_in_log_space(self):
        src = IidCategorical([0.5, 0.5])
        s = Sequence.of(src.alphabet, [0] * 2000)
        assert src.log_joint(s) == pytest.approx(2000 * math.log(0.5), rel=1e-12)


class TestConsistency:
    """Summing the joint over the last symbol recovers the prefix joint."""

    @pytest.mark.parametrize(
        "src",
        [
            IidCategorical([0.2, 0.3, 0.5]),
            MarkovOrderM(
                1,
                [[0.6, 0.3, 0.1], [0.1, 0.8, 0.1], [0.25, 0.25, 0.5]],
                [0.4, 0.4, 0.2],
            ),
            DeterministicPeriodic(seq(3, [2, 0, 1])),
        ],
    )
    def test_marginalization(self, src):
        ab = src.alphabet
        for n in range(1, 7):
            for prefix in all_prefixes(ab.size, n - 1):
                total = sum(
                    src.joint(Sequence.of(ab, prefix + (a,))) for a in range(ab.size)
                )
                assert total == pytest.approx(
                    src.joint(Sequence.of(ab, prefix)), abs=1e-12
                )


@st.composite
def random_source(draw, max_symbols=4):
    size = draw(st.integers(min_value=2, max_value=max_symbols))
    kind = draw(st.sampled_from(["iid", "markov", "periodic"]))
    positive = st.floats(min_value=0.01, max_value=1.0)

    def simplex():
        raw = draw(st.lists(positive, min_size=size, max_size=size))
        total = sum(raw)
        return [x / total for x in raw]

    if kind == "iid":
        return IidCategorical(simplex())
    if kind == "markov":
        order = draw(st.integers(min_value=1, max_value=2))
        table = [simplex() for _ in range(size**order)]
        return MarkovOrderM(order, table, simplex())
    pattern = draw(
        st.lists(st.integers(min_value=0, max_value=size - 1), min_size=1, max_size=4)
    )
    return DeterministicPeriodic(Sequence.of(Alphabet(size), pattern))


class TestNormalizationProperty:
    @given(
        src=random_source(),
        prefix_bits=st.lists(st.integers(min_value=0, max_value=3), max_size=8),
    )
    @settings(max_examples=200, deadline=None)
    def test_conditionals_sum_to_one(self, src, prefix_bits):
        size = src.alphabet.size
        prefix = [b % size for b in prefix_bits]
        cond = src.conditional_vector(prefix)
        assert sum(cond) == pytest.approx(1.0, abs=1e-12)
        assert all(0.0 <= p <= 1.0 for p in cond)


class TestSampling:
    def test_periodic_sample_is_the_pattern(self):
        src = DeterministicPeriodic(seq(2, [0, 1]))
        out = src.sample(4, trial_rng(0, 0))
        assert out.symbols == (0, 1, 0, 1)

    def test_point_mass_sample(self):
        src = IidCategorical([1.0, 0.0])
        out = src.sample(3, trial_rng(123, 0))
        assert out.symbols == (0, 0, 0)

    def test_fair_coin_concentration(self):
        src = IidCategorical([0.5, 0.5])
        out = src.sample(10_000, trial_rng(42, 0))
        freq = out.symbols.count(0) / 10_000
        assert abs(freq - 0.5) < 0.02

    def test_same_seed_same_draws(self):
        src = MarkovOrderM(1, [[0.9, 0.1], [0.2, 0.8]], [0.5, 0.5])
        a = src.sample(64, trial_rng(7, 3))
        b = src.sample(64, trial_rng(7, 3))
        assert a.symbols == b.symbols

    def test_distinct_trials_get_distinct_streams(self):
        src = IidCategorical([0.5, 0.5])
        a = src.sample(64, trial_rng(7, 0))
        b = src.sample(64, trial_rng(7, 1))
        assert a.symbols != b.symbols


class TestValidation:
    def test_unnormalized_probabilities_rejected(self):
        with pytest.raises(ValueError):
            IidCategorical([0.5, 0.6])

    def test_negative_entries_rejected(self):
        with pytest.raises(ValueError):
            IidCategorical([1.5, -0.5])

    def test_bad_transition_shape_rejected(self):
        with pytest.raises(ValueError):
            MarkovOrderM(2, [[0.5, 0.5], [0.5, 0.5]], [0.5, 0.5])

    def test_empty_pattern_rejected(self):
        with pytest.raises(ValueError):
            DeterministicPeriodic(seq(2, []))
