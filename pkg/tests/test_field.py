from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermitian_spherical.errors import (
    PrecisionTooLow,
    SquareDefect,
    UnramifiedCase,
    ZeroInput,
)
from hermitian_spherical.extension import Case, ExtElem, quadratic_extension
from hermitian_spherical.padic import INF, BaseField

RP = quadratic_extension(2, 2)
RU = quadratic_extension(2, -5)
UNR = quadratic_extension(2, 5)
TAME = quadratic_extension(3, 3)
FIELDS = {"RP": RP, "RU": RU, "UNR": UNR, "TAME": TAME}


# -- base field --------------------------------------------------------------

def test_base_valuation_and_units():
    E = BaseField(2, 10)
    x = E(12)
    assert x.valuation() == 2 and x.unit_residue(3) == 3
    assert E(Fraction(1, 4)).valuation() == -2
    assert E(0).is_exact_zero() and E(0).valuation() == INF


def test_cancellation_loses_precision():
    E = BaseField(2, 6)
    a = E(1) + E(2) ** 10  # beyond precision
    d = a - E(1)
    assert d.is_zero() and not d.is_exact_zero()
    assert d.absprec >= 6


def test_parse_forms():
    E = BaseField(2, 10)
    assert E.parse("pi^3*3") == E(24)
    assert E.parse("-pi^2") == E(-4)
    assert E.parse("5") == E(5)
    assert E.parse("pi") == E(2)
    with pytest.raises(ValueError):
        E.parse("pi^*")


def test_unit_residue_needs_precision():
    E = BaseField(2, 4)
    with pytest.raises(PrecisionTooLow):
        E(3).unit_residue(10)


# -- extensions ---------------------------------------------------------------

@pytest.mark.parametrize("p,d,case,s,l", [
    (2, 2, Case.RP, 2, 1),
    (2, -5, Case.RU, 1, 0),
    (2, 3, Case.RU, 1, 0),
    (2, 6, Case.RP, 2, 1),
    (2, 5, Case.UNRAMIFIED, None, None),
    (3, 3, Case.TAME, 0, None),
    (3, 2, Case.UNRAMIFIED, None, None),
])
def test_case_and_invariants(p, d, case, s, l):
    ext = quadratic_extension(p, d)
    assert ext.case is case
    assert ext.s == s
    if l is not None:
        assert ext.l == l


def test_summary_lines():
    assert RP.summary() == "RP, s=2, l=1, q=2"
    assert RU.summary() == "RU, s=1, l=0, q=2"


@pytest.mark.parametrize("p,d", [(2, 4), (2, 9), (2, 17), (3, 4), (3, 7)])
def test_squares_rejected(p, d):
    with pytest.raises(SquareDefect):
        quadratic_extension(p, d)


def test_precision_floor():
    with pytest.raises(PrecisionTooLow):
        quadratic_extension(2, 2, precision=6)


def test_uniformizer_and_norm():
    for ext in (RP, RU):
        w = ext.uniformizer
        assert w.valuation() == 1
        assert w.norm() == ext.pi
    assert UNR.uniformizer.valuation() == 1


def test_s_definition():
    for ext in (RP, RU):
        w = ext.uniformizer
        assert (w.conjugate() / w - 1).valuation() == ext.s


def test_delta_is_not_a_norm():
    for ext in (RP, RU):
        assert ext.chi_star(ext.delta) == -1
        assert ext.chi_star(ext.pi) == 1
        assert (ext.delta - 1).valuation() == ext.s


def test_norm_residues_dyadic():
    assert RP.norm_residues == frozenset({1, 7})
    assert RU.norm_residues == frozenset({1})


def test_trace_exponent_matches_enumeration():
    for ext in (RP, RU, UNR, TAME):
        for i in range(0, 5):
            vals = [(ext.uniformizer ** i * x).trace().valuation()
                    for x in ext.residue_system(ext.norm_depth + 3)]
            assert min(vals) == ext.trace_exponent(i)


def test_trace_image_unramified_raises():
    with pytest.raises(UnramifiedCase):
        UNR.trace_image_exponent(1)


def test_is_norm_of_zero():
    with pytest.raises(ZeroInput):
        RP.is_norm(0)


# -- property suite (1000 random cases) -----------------------------------------

digits = st.integers(min_value=-200, max_value=200)
ext_names = st.sampled_from(sorted(FIELDS))


def _elem(ext, a, b, k):
    return ExtElem(ext, ext.base(a), ext.base(b)) * ext.uniformizer ** k


@settings(max_examples=1000, deadline=None)
@given(ext_names, digits, digits, digits, digits, st.integers(0, 3), st.integers(0, 3))
def test_filtration_and_multiplicativity(name, a, b, c, d, k1, k2):
    ext = FIELDS[name]
    x, y = _elem(ext, a, b, k1), _elem(ext, c, d, k2)
    if x.is_zero() or y.is_zero():
        return
    # valuations add, the ultrametric inequality holds
    assert (x * y).valuation() == x.valuation() + y.valuation()
    s = x + y
    if not s.is_zero():
        assert s.valuation() >= min(x.valuation(), y.valuation())
    # norm is multiplicative, trace additive, conjugation an involution
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    assert x.conjugate().conjugate() == x
    # v_E(N x) = v_F(x) (ramified) or 2 v_F(x) (unramified)
    factor = 1 if ext.case.ramified else 2
    assert x.norm().valuation() == factor * x.valuation()
    # chi* is a character on E^*
    n1, n2 = x.norm() * ext.base(c or 1), ext.base(a or 1)
    assert ext.chi_star(n1 * n2) == ext.chi_star(n1) * ext.chi_star(n2)
    # norms are norms
    assert ext.chi_star(x.norm()) == 1
