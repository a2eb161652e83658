"""Mixture marginals, conditionals, posterior weights, and dominance."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqmix import (
    Alphabet,
    DeterministicPeriodic,
    IidCategorical,
    MarkovOrderM,
    MixtureSource,
    MixtureState,
    ModelClass,
    PrefixImpossibleError,
    Sequence,
    description_length,
    weight_by_description_length,
    weights_from_description_lengths,
)

from helpers import all_prefixes, direct_joint, mixture_joint


@pytest.fixture
def running_class():
    ab = Alphabet(2)
    return ModelClass.uniform(
        [DeterministicPeriodic(Sequence.of(ab, [1])), IidCategorical([0.5, 0.5])]
    )


class TestModelClassValidation:
    def test_weights_must_normalize(self):
        models = [IidCategorical([0.5, 0.5]), IidCategorical([0.3, 0.7])]
        with pytest.raises(ValueError):
            ModelClass(models, [0.5, 0.6])

    def test_weights_must_be_positive(self):
        models = [IidCategorical([0.5, 0.5]), IidCategorical([0.3, 0.7])]
        with pytest.raises(ValueError):
            ModelClass(models, [1.0, 0.0])

    def test_models_must_share_alphabet(self):
        with pytest.raises(ValueError):
            ModelClass.uniform(
                [IidCategorical([0.5, 0.5]), IidCategorical([0.2, 0.3, 0.5])]
            )

    def test_empty_class_rejected(self):
        with pytest.raises(ValueError):
            ModelClass.uniform([])


class TestInitialState:
    def test_empty_prefix_has_log_probability_zero(self, running_class):
        state = MixtureState.initial(running_class)
        assert state.log_prob == 0.0
        assert state.log_marginals == (0.0, 0.0)

    def test_uniform_two_model_dominance_gap_is_ln2(self, running_class):
        gaps = MixtureState.initial(running_class).dominance_gaps()
        np.testing.assert_allclose(gaps, math.log(2), atol=1e-15)

    def test_singleton_class_reproduces_its_model(self):
        model = IidCategorical([0.3, 0.7])
        state = MixtureState.initial(ModelClass.uniform([model]))
        for symbols in all_prefixes(2, 3):
            s = state
            for x in symbols:
                s = s.advance(x)
            expected = model.conditional_vector(symbols)
            assert s.conditional_vector() == pytest.approx(expected, abs=1e-15)


class TestConditional:
    def test_empty_prefix_value(self, running_class):
        # oracle: exact rational mix (1*1 + 1*(1/2)) / 2
        expected = (Fraction(1, 2) * 1 + Fraction(1, 2) * Fraction(1, 2)) / 1
        state = MixtureState.initial(running_class)
        assert state.conditional(1) == pytest.approx(float(expected), abs=1e-15)
        assert float(expected) == 0.75

    def test_after_one_symbol(self, running_class):
        # oracle: ratio of rational mixture joints of "11" and "1"
        joint1 = Fraction(1, 2) * 1 + Fraction(1, 2) * Fraction(1, 2)
        joint11 = Fraction(1, 2) * 1 + Fraction(1, 2) * Fraction(1, 4)
        expected = joint11 / joint1
        assert expected == Fraction(5, 6)
        state = MixtureState.initial(running_class).advance(1)
        assert state.conditional(1) == pytest.approx(float(expected), abs=1e-15)

    def test_impossible_prefix_raises(self):
        ab = Alphabet(2)
        mc = ModelClass.uniform(
            [
                DeterministicPeriodic(Sequence.of(ab, [1])),
                DeterministicPeriodic(Sequence.of(ab, [1, 0])),
            ]
        )
        state = MixtureState.initial(mc).advance(0)  # neither model starts with 0
        assert state.log_prob == -math.inf
        with pytest.raises(PrefixImpossibleError):
            state.conditional_vector()
        with pytest.raises(PrefixImpossibleError):
            state.posterior_weights()


class TestAdvance:
    def test_posterior_reweights_toward_the_survivor(self, running_class):
        state = MixtureState.initial(running_class).advance(1)
        np.testing.assert_allclose(state.posterior_weights(), [2 / 3, 1 / 3], atol=1e-15)

    def test_forbidden_symbol_zeroes_the_model(self, running_class):
        state = MixtureState.initial(running_class).advance(0)
        posterior = state.posterior_weights()
        assert posterior[0] == 0.0
        assert posterior[1] == 1.0
        assert state.log_marginals[0] == -math.inf

    def test_all_ones_closed_form_marginal(self, running_class):
        state = MixtureState.initial(running_class)
        for n in range(1, 12):
            state = state.advance(1)
            assert state.log_prob == pytest.approx(
                math.log((1 + 2.0**-n) / 2), abs=1e-12
            )

    def test_advance_does_not_mutate(self, running_class):
        state = MixtureState.initial(running_class)
        state.advance(1)
        assert state.depth == 0
        assert state.log_prob == 0.0


@st.composite
def small_class(draw):
    size = draw(st.integers(min_value=2, max_value=3))
    count = draw(st.integers(min_value=1, max_value=4))
    positive = st.floats(min_value=0.05, max_value=1.0)

    def simplex(k):
        raw = draw(st.lists(positive, min_size=k, max_size=k))
        total = sum(raw)
        return [x / total for x in raw]

    models = []
    for _ in range(count):
        kind = draw(st.sampled_from(["iid", "markov", "periodic"]))
        if kind == "iid":
            models.append(IidCategorical(simplex(size)))
        elif kind == "markov":
            models.append(
                MarkovOrderM(1, [simplex(size) for _ in range(size)], simplex(size))
            )
        else:
            pattern = draw(
                st.lists(
                    st.integers(min_value=0, max_value=size - 1), min_size=1, max_size=3
                )
            )
            models.append(DeterministicPeriodic(Sequence.of(Alphabet(size), pattern)))
    return ModelClass(models, simplex(count))


class TestMixtureProperties:
    @given(mc=small_class(), data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_dominance_along_random_prefixes(self, mc, data):
        size = mc.alphabet.size
        prefix = data.draw(
            st.lists(st.integers(min_value=0, max_value=size - 1), max_size=6)
        )
        state = MixtureState.initial(mc)
        for x in prefix:
            state = state.advance(x)
            # log mixture >= log w_i + log model_i, up to float slack
            for i in range(len(mc)):
                lower = mc.log_weights[i] + state.log_marginals[i]
                if lower == -math.inf:
                    continue
                assert state.log_prob >= lower - 1e-10

    @given(mc=small_class(), data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_reachable_states_stay_normalized(self, mc, data):
        size = mc.alphabet.size
        state = MixtureState.initial(mc)
        for _ in range(data.draw(st.integers(min_value=0, max_value=6))):
            cond = state.conditional_vector()
            assert sum(cond) == pytest.approx(1.0, abs=1e-10)
            posterior = state.posterior_weights()
            assert posterior.sum() == pytest.approx(1.0, abs=1e-10)
            assert np.all(posterior >= 0.0)
            # draw only symbols the mixture can actually produce
            viable = [a for a in range(size) if cond[a] > 0.0]
            state = state.advance(data.draw(st.sampled_from(viable)))

    @given(mc=small_class())
    @settings(max_examples=100, deadline=None)
    def test_incremental_equals_direct_weighted_sum(self, mc):
        size = mc.alphabet.size
        horizon = 6 if size == 2 else 5
        for symbols in all_prefixes(size, horizon):
            state = MixtureState.initial(mc)
            for x in symbols:
                state = state.advance(x)
            direct = mixture_joint(mc, symbols)
            if direct == 0.0:
                assert state.log_prob == -math.inf
            else:
                assert math.exp(state.log_prob) == pytest.approx(direct, rel=1e-10)


class TestMixtureSource:
    def test_wraps_the_state_protocol(self, running_class):
        src = MixtureSource(running_class)
        assert src.conditional([], 1) == pytest.approx(0.75, abs=1e-15)
        assert src.conditional([1], 1) == pytest.approx(5 / 6, abs=1e-15)
        # joint of "11" equals the direct weighted sum
        assert src.joint(Sequence.of(src.alphabet, [1, 1])) == pytest.approx(
            mixture_joint(running_class, (1, 1)), rel=1e-12
        )


class TestDescriptionLengthWeights:
    def test_equal_lengths_give_equal_weights(self):
        w = weights_from_description_lengths([5.0, 5.0])
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-15)

    def test_one_and_two_bits(self):
        # oracle: 2**-1 and 2**-2 normalized are exactly 2/3 and 1/3
        w = weights_from_description_lengths([1.0, 2.0])
        np.testing.assert_allclose(w, [2 / 3, 1 / 3], atol=1e-15)

    def test_weights_are_positive_and_normalized(self):
        ab = Alphabet(3)
        models = [
            IidCategorical([0.2, 0.3, 0.5]),
            MarkovOrderM(
                1,
                [[0.6, 0.3, 0.1], [0.1, 0.8, 0.1], [0.25, 0.25, 0.5]],
                [0.4, 0.4, 0.2],
            ),
            DeterministicPeriodic(Sequence.of(ab, [0, 1, 2])),
        ]
        w = weight_by_description_length(models)
        assert np.all(w > 0.0)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        # the mixture accepts them as a prior
        ModelClass(models, w)

    def test_simpler_families_weigh_more(self):
        ab = Alphabet(2)
        periodic = DeterministicPeriodic(Sequence.of(ab, [0, 1]))
        iid = IidCategorical([0.5, 0.5])
        markov = MarkovOrderM(1, [[0.9, 0.1], [0.2, 0.8]], [0.5, 0.5])
        assert description_length(periodic) < description_length(iid)
        assert description_length(iid) < description_length(markov)
        w = weight_by_description_length([periodic, iid, markov])
        assert w[0] > w[1] > w[2]

    def test_underflow_spread_is_rejected(self):
        with pytest.raises(ValueError):
            weights_from_description_lengths([0.0, 5000.0])
