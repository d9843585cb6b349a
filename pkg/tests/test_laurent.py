from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermitian_spherical.errors import DivisionByZero, PoleAtPoint
from hermitian_spherical.laurent import (
    LaurentPoly,
    LaurentRational,
    equals,
    eval_at,
    qpow,
    sigma_sum,
    sigma_swap,
)

Q = 2


def test_u_reduces_against_q():
    # u^4 = q, and for q = 4 already u^2 = 2
    assert qpow(2, 1) == LaurentRational.const(2, 2)
    assert qpow(4, Fraction(1, 2)) == LaurentRational.const(2, 4)
    assert qpow(2, Fraction(1, 2)) != LaurentRational.const(1, 2)
    assert qpow(16, Fraction(1, 4)) == LaurentRational.const(2, 16)


def test_quarter_grid_enforced():
    with pytest.raises(ValueError):
        qpow(2, Fraction(1, 3))


def test_geometric_series_identity():
    x = qpow(Q, 0, 1, -1)
    lhs = 1 / (1 - x)
    rhs = 1 + x / (1 - x)
    assert equals(lhs, rhs)


def test_sigma_swap_and_sum():
    f = qpow(Q, 0, 2, 0) / (qpow(Q, 0, 2, 0) - qpow(Q, 0, 0, 2))
    assert equals(sigma_sum(f), LaurentRational.one(Q))
    assert equals(sigma_swap(sigma_swap(f)), f)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        LaurentRational.one(Q) / LaurentRational.zero(Q)


def test_pole_detected():
    f = 1 / (qpow(Q, 0, 1, 0) - qpow(Q, 0, 0, 1))
    with pytest.raises(PoleAtPoint):
        eval_at(f, Q, 0.3, 0.3)


def test_eval_matches_definition():
    f = qpow(Q, Fraction(1, 4), 2, -1, coeff=3)
    z1, z2 = 0.2 + 0.1j, -0.4
    assert abs(eval_at(f, Q, z1, z2) - 3 * cmath.exp(cmath.log(2) * (0.25 + 2 * z1 - z2))) < 1e-12


def test_mixed_q_rejected():
    with pytest.raises(ValueError):
        qpow(2, 1) + qpow(3, 1)


def test_records_round_trip_shape():
    f = (qpow(Q, 0, 1, 0) + 1) / (qpow(Q, 0, 0, 1) - 2)
    rec = f.records()
    assert rec["q"] == Q and rec["num"] and rec["den"]


# -- ring axioms (500 random cases) ---------------------------------------------

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exp = st.integers(min_value=-3, max_value=3)
term = st.tuples(st.tuples(st.integers(0, 7), exp, exp), coeff)


@st.composite
def polys(draw):
    return LaurentPoly(dict(draw(st.lists(term, min_size=1, max_size=3))))


@st.composite
def rationals(draw):
    num = draw(polys())
    den = draw(polys())
    if den.reduce(Q).is_zero():
        den = LaurentPoly.const(1)
    return LaurentRational(num, den, Q)


@settings(max_examples=500, deadline=None)
@given(rationals(), rationals(), rationals())
def test_field_axioms(f, g, h):
    assert equals(f + g, g + f)
    assert equals(f * g, g * f)
    assert equals((f + g) + h, f + (g + h))
    assert equals((f * g) * h, f * (g * h))
    assert equals(f * (g + h), f * g + f * h)
    assert equals(f - f, LaurentRational.zero(Q))
    assert equals(f * LaurentRational.one(Q), f)
    if not g.is_zero():
        assert equals((f / g) * g, f)
    assert equals(sigma_swap(f * g), sigma_swap(f) * sigma_swap(g))
