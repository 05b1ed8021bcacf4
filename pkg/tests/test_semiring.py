import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from src.errors import InvalidArgumentError, ParseError
from src.semiring import (BOTTOM, ONE, MaxPlusScalar, odot, odot_inverse, oplus, oplus_all, oplus_h,
                          oplus_h_all, precedes)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
scalars = st.one_of(st.just(BOTTOM), finite.map(MaxPlusScalar))
small_ints = st.integers(min_value=-1000, max_value=1000).map(lambda i: MaxPlusScalar(float(i)))
int_scalars = st.one_of(st.just(BOTTOM), small_ints)


def test_oplus_examples():
    assert oplus(3, 5) == MaxPlusScalar(5.0)
    assert oplus(BOTTOM, 7) == MaxPlusScalar(7.0)
    assert oplus(-2.5, -2.5) == MaxPlusScalar(-2.5)


def test_odot_examples():
    assert odot(3, 5) == MaxPlusScalar(8.0)
    assert odot(ONE, 4.25) == MaxPlusScalar(4.25)
    assert odot(BOTTOM, 7).is_bottom
    assert odot(7, float("-inf")).is_bottom


def test_precedes_examples():
    assert precedes(BOTTOM, -3)
    assert precedes(2, 2)
    assert not precedes(5, 2)
    assert not precedes(0, BOTTOM)


def test_negative_infinity_is_bottom():
    assert MaxPlusScalar(float("-inf")).is_bottom
    assert MaxPlusScalar.of("-inf") == BOTTOM
    assert MaxPlusScalar.of(None) == BOTTOM
    assert BOTTOM.to_float() == -math.inf


@pytest.mark.parametrize("bad", [float("nan"), float("inf")])
def test_rejects_nan_and_plus_infinity(bad):
    with pytest.raises(InvalidArgumentError):
        MaxPlusScalar(bad)


def test_json_representation():
    assert BOTTOM.to_json() == "-inf"
    assert MaxPlusScalar.from_json("-inf") == BOTTOM
    x = 0.1 + 0.2
    assert MaxPlusScalar.from_json(MaxPlusScalar(x).to_json()).value == x
    with pytest.raises(ParseError):
        MaxPlusScalar.from_json("zero")
    with pytest.raises(ParseError):
        MaxPlusScalar.from_json(True)


def test_oplus_all_and_inverse():
    assert oplus_all([]) == BOTTOM
    assert oplus_all([-1, BOTTOM, -4]) == MaxPlusScalar(-1.0)
    assert odot_inverse(3) == MaxPlusScalar(-3.0)
    assert odot(odot_inverse(2.5), 2.5) == ONE
    with pytest.raises(InvalidArgumentError):
        odot_inverse(BOTTOM)


@given(scalars, scalars, scalars)
def test_oplus_is_associative_commutative_idempotent(a, b, c):
    assert oplus(oplus(a, b), c) == oplus(a, oplus(b, c))
    assert oplus(a, b) == oplus(b, a)
    assert oplus(a, a) == a
    assert oplus(a, BOTTOM) == a


@given(int_scalars, int_scalars, int_scalars)
def test_odot_is_associative_and_commutative(a, b, c):
    assert odot(odot(a, b), c) == odot(a, odot(b, c))
    assert odot(a, b) == odot(b, a)
    assert odot(a, ONE) == a


@given(scalars, scalars, scalars)
def test_odot_distributes_over_oplus(a, b, c):
    assert odot(a, oplus(b, c)) == oplus(odot(a, b), odot(a, c))


@given(scalars, scalars)
def test_precedes_matches_max(a, b):
    assert precedes(a, b) == (a.to_float() <= b.to_float())


# ---------------------------------------------------------------------- dequantization

def test_oplus_h_examples():
    assert oplus_h(0, 0, 1) == pytest.approx(math.log(2), abs=1e-12)
    assert abs(oplus_h(0, -10, 0.01)) <= 1e-12
    assert oplus_h(3, 5, 1e-6) == pytest.approx(5.0, abs=1e-9)


@pytest.mark.parametrize("h", [0.0, -1.0, float("inf"), float("nan")])
def test_oplus_h_rejects_bad_h(h):
    with pytest.raises(InvalidArgumentError):
        oplus_h(1.0, 2.0, h)


def test_oplus_h_rejects_infinite_arguments():
    with pytest.raises(InvalidArgumentError):
        oplus_h(float("-inf"), 0.0, 1.0)


def test_oplus_h_does_not_overflow():
    assert oplus_h(1e4, 1e4, 1e-3) == pytest.approx(1e4 + 1e-3 * math.log(2))


def test_dequantization_gap_is_bounded(rng):
    for _ in range(100):
        u, v = rng.uniform(-10, 10, size=2)
        for h in (1, 0.1, 0.01, 0.001):
            gap = oplus_h(u, v, h) - max(u, v)
            assert 0 <= gap <= h * math.log(2) + 1e-12


def test_dequantization_converges_to_max():
    gaps = [oplus_h(3, 5, h) - 5 for h in (1, 0.1, 0.01, 0.001)]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-12


@given(finite, finite, st.floats(min_value=1e-3, max_value=10), st.floats(min_value=-100, max_value=100))
def test_oplus_h_symmetric_and_shift_equivariant(u, v, h, c):
    assert oplus_h(u, v, h) == oplus_h(v, u, h)
    assert oplus_h(u + c, v + c, h) == pytest.approx(oplus_h(u, v, h) + c, rel=1e-9, abs=1e-6)


def test_oplus_h_all_agrees_with_pairwise():
    assert oplus_h_all([0, 0], 1) == pytest.approx(math.log(2))
    assert oplus_h_all([1.5, -2.0], 0.3) == pytest.approx(oplus_h(1.5, -2.0, 0.3), abs=1e-12)
    values = np.linspace(-1, 1, 7)
    assert oplus_h_all(values, 1e-4) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(InvalidArgumentError):
        oplus_h_all([], 1.0)
