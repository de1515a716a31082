import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from parityscan import (
    CountDistribution,
    DomainError,
    convolve,
    parity_of_distribution,
    poisson_distribution,
)


def poisson_pmf(mean, n):
    # independent oracle: direct formula e^-m m^n / n!
    return math.exp(-mean) * mean**n / math.factorial(n)


class TestCountDistribution:
    def test_rejects_negative_entries(self):
        with pytest.raises(DomainError):
            CountDistribution([0.5, -0.1, 0.6])

    def test_rejects_oversum(self):
        with pytest.raises(DomainError):
            CountDistribution([0.7, 0.7])

    def test_clamps_rounding_negatives(self):
        d = CountDistribution([1.0, -1e-15])
        assert d.probs[1] == 0.0

    def test_deficit_tracked(self):
        d = CountDistribution([0.25, 0.25])
        assert d.deficit == pytest.approx(0.5, abs=1e-15)

    def test_mean(self):
        d = CountDistribution([0.5, 0.25, 0.25])
        assert d.mean() == pytest.approx(0.75, abs=1e-15)


class TestPoisson:
    def test_zero_mean_is_delta(self):
        p = poisson_distribution(0.0, 8)
        assert p.probs[0] == 1.0
        assert np.all(p.probs[1:] == 0.0)

    def test_mean_half_values(self):
        # frozen from the direct formula
        p = poisson_distribution(0.5, 16)
        assert p.probs[0] == pytest.approx(0.6065306597126334, abs=1e-15)
        assert p.probs[1] == pytest.approx(0.3032653298563167, abs=1e-15)
        assert p.probs[2] == pytest.approx(0.07581633246407918, abs=1e-15)
        for n in range(10):
            assert p.probs[n] == pytest.approx(poisson_pmf(0.5, n), abs=1e-15)

    def test_parity_is_exp_minus_two_mean(self):
        # alternating Poisson series sums to e^{-2 lambda}
        assert parity_of_distribution(poisson_distribution(0.5, 40)) == pytest.approx(
            0.36787944117144233, abs=1e-12
        )
        assert parity_of_distribution(poisson_distribution(1.0, 40)) == pytest.approx(
            0.1353352832366127, abs=1e-12
        )

    def test_tail_violation_raises(self):
        with pytest.raises(DomainError):
            poisson_distribution(20.0, 10)

    def test_negative_mean_raises(self):
        with pytest.raises(DomainError):
            poisson_distribution(-0.1, 10)


class TestConvolve:
    def test_delta_is_identity(self):
        a = CountDistribution([0.2, 0.3, 0.5])
        delta = CountDistribution([1.0, 0.0, 0.0])
        out = convolve(a, delta)
        np.testing.assert_allclose(out.probs, a.probs, atol=1e-15)

    def test_poisson_additivity(self):
        x = poisson_distribution(0.3, 40)
        y = poisson_distribution(0.3, 40)
        target = poisson_distribution(0.6, 40)
        np.testing.assert_allclose(convolve(x, y).probs, target.probs, atol=1e-12)

    def test_truncation_adds_to_deficit(self):
        a = CountDistribution([0.5, 0.5])
        out = convolve(a, a)
        # (0.25, 0.5) kept, 0.25 truncated into the deficit
        assert out.probs.tolist() == [0.25, 0.5]
        assert out.deficit == pytest.approx(0.25, abs=1e-15)


class TestParity:
    def test_delta(self):
        assert parity_of_distribution(CountDistribution([1.0])) == 1.0

    def test_two_level(self):
        assert parity_of_distribution(
            CountDistribution([0.3098, 0.6902])
        ) == pytest.approx(-0.3804, abs=1e-15)


@st.composite
def distributions(draw):
    n = draw(st.integers(min_value=1, max_value=16))
    raw = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    total = sum(raw)
    if total > 1.0:
        raw = [x / total for x in raw]
    return CountDistribution(raw)


@given(distributions(), distributions())
def test_parity_factorizes_over_convolution(a, b):
    # pad so the product is not truncated, then parity(a*b) = parity(a) parity(b)
    apad = CountDistribution(np.concatenate([a.probs, np.zeros(len(b))]))
    bpad = CountDistribution(np.concatenate([b.probs, np.zeros(len(a))]))
    lhs = parity_of_distribution(convolve(apad, bpad))
    rhs = parity_of_distribution(a) * parity_of_distribution(b)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(distributions())
def test_parity_bounded_by_total_mass(p):
    assert abs(parity_of_distribution(p)) <= p.total + 1e-12
