import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from henselab.errors import PrecisionExhausted
from henselab.field import FieldElem, const, gen, t_elem
from henselab.series import (
    INF,
    TruncSeries,
    eval_series,
    exp_monomial_coeffs,
    laurent_to_ratfunc,
    precision_cap,
    series_mod,
    valuation,
)

from strategies import elements, nonzero_elements

t, e1 = t_elem(), gen(1)


def coeffs(s: TruncSeries, n: int):
    return [s.coefficient(k) for k in range(n)]


def test_exp_series():
    assert coeffs(eval_series(e1, 4), 4) == [1, 1, Fraction(1, 2), Fraction(1, 6)]


def test_geometric_series():
    assert coeffs(eval_series(1 / (1 - t), 3), 3) == [1, 1, 1]


def test_exp_minus_linear_part():
    s = eval_series(e1 - 1 - t, 3)
    assert s.to_dict() == {2: Fraction(1, 2)}


def test_exp_of_monomial_matches_factorials():
    # exp(t^2) = sum t^(2k)/k!
    got = exp_monomial_coeffs(2, 9)
    want = [Fraction(1, math.factorial(k // 2)) if k % 2 == 0 else 0 for k in range(9)]
    assert got == want


def test_valuations():
    assert valuation(t**3 * (1 + t) / (2 + t)) == 3
    assert valuation(e1 - 1) == 1
    assert valuation(const(0)) == INF


def test_laurent_offsets():
    s = eval_series(1 / (t * t), 1)
    assert s.offset == -2 and s.coefficient(-2) == 1


def test_precision_bookkeeping_of_products():
    a = TruncSeries.exact({1: Fraction(1)}, 5)   # t + O(t^5)
    b = TruncSeries.exact({0: Fraction(2)}, 3)   # 2 + O(t^3)
    assert (a * b).precision == 4


def test_cap_is_loud():
    # e1 - trunc_40(e1) vanishes to order 40, beyond a cap of 32
    from henselab.field import truncation

    a = e1 - truncation(e1, 40)
    assert valuation(a) == 40
    with precision_cap(32), pytest.raises(PrecisionExhausted):
        valuation(a)
    b = FieldElem.leaf(_Flat())
    with precision_cap(32), pytest.raises(PrecisionExhausted):
        valuation(b)


class _Flat:
    """An analytic leaf that looks like zero to every precision."""

    def series(self, prec):
        return TruncSeries.zero(prec)

    def derive(self, D):
        return FieldElem.coerce(0)

    def serialize(self):
        return "flat"


def test_round_trip_to_laurent_polynomial():
    s = series_mod(e1 / t, 4)
    r = laurent_to_ratfunc(s)
    assert series_mod(r, 4) == s


@given(nonzero_elements, nonzero_elements)
def test_valuation_is_additive(a, b):
    assert valuation(a * b) == valuation(a) + valuation(b)


@given(nonzero_elements, nonzero_elements)
def test_ultrametric_inequality(a, b):
    va, vb = valuation(a), valuation(b)
    vs = valuation(a + b)
    assert vs >= min(va, vb)
    if va != vb:
        assert vs == min(va, vb)


@given(elements, elements, st.integers(1, 8))
def test_series_is_a_ring_homomorphism(a, b, n):
    assert series_mod(a + b, n) == (series_mod(a, n) + series_mod(b, n)).truncate(n)
    lo = min(valuation(a), valuation(b), 0)
    if lo == INF:
        return
    # multiplication loses precision by the partner's valuation; evaluate wider and compare
    w = n + 2 * int(max(0, -lo)) + 2
    assert series_mod(a * b, n) == (series_mod(a, w) * series_mod(b, w)).truncate(n)


@given(nonzero_elements)
def test_valuation_stable_under_larger_cap(a):
    v = valuation(a)
    with precision_cap(8192):
        assert valuation(a) == v
