from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest

from hermitian_spherical.errors import RepNotInTable, WrongCase
from hermitian_spherical.extension import quadratic_extension
from hermitian_spherical.laurent import LaurentRational, equals, eval_at, qpow, sigma_swap
from hermitian_spherical.orbits import Representative, Tag, _perturbation, representative_table
from hermitian_spherical.spherical import (
    CHARS,
    CharacterPair,
    closed_form,
    compare,
    functional_equation_check,
    hyperbolic0_derived_form,
    oracle_eval,
    plane6_derived_form,
    sample_points,
    scaling_check,
    statement_form,
    tilde,
    verify_all,
    with_precision,
)

RP = quadratic_extension(2, 2)
RU = quadratic_extension(2, -5)
UNR = quadratic_extension(2, 5)
TRIV = CharacterPair()
H0 = Representative(Tag.HYPERBOLIC0)
H1 = Representative(Tag.HYPERBOLIC1)
DP = Representative(Tag.DELTA_PLANE)


def test_character_pair():
    assert CharacterPair.parse("1", "star") == CharacterPair("trivial", "star")
    assert CharacterPair("trivial", "star").twisted() == TRIV
    assert TRIV.value(RP, 1, 0) == 0
    with pytest.raises(ValueError):
        CharacterPair("x", "trivial")


def test_delta_plane_rp():
    # chi2(-Delta) q^(l - 2 s z2) q^(s (z1 + z2)) with s = 2, l = 1
    assert equals(closed_form(RP, DP, TRIV), qpow(2, 1, 2, -2))
    assert equals(closed_form(RP, DP, CharacterPair("trivial", "star")),
                  qpow(2, 1, 2, -2, coeff=RP.chi_star(-RP.delta)))


def test_star_vanishing_closed():
    for ext in (RP, RU):
        for rep in representative_table(ext, 4):
            f = closed_form(ext, rep, CharacterPair("star", "trivial"))
            big = rep.tag is Tag.DIAGONAL and rep.gap > ext.s
            assert f.is_zero() != big


def test_ru_hyperbolic0():
    q, s = 2, 1
    want = (q * qpow(q, 0, s + 1, s + 1 - 2 * s) * (1 - Fraction(1, q))
            / (qpow(q, 0, 0, 2) - qpow(q, 0, 2, 0)))
    assert equals(closed_form(RU, H0, TRIV), want)


@pytest.mark.parametrize("ext", [RP, RU])
@pytest.mark.parametrize("tag", [Tag.HYPERBOLIC0, Tag.HYPERBOLIC1, Tag.DELTA_PLANE])
def test_oracle_exact_on_modular_entries(ext, tag):
    rep = Representative(tag)
    for c1 in CHARS:
        for c2 in CHARS:
            chars = CharacterPair(c1, c2)
            o = oracle_eval(ext, rep.matrix(ext), chars)
            assert o.tail_bound == 0
            assert equals(o.assembled, closed_form(ext, rep, chars))


def test_oracle_h0_star_is_zero():
    o = oracle_eval(RP, H0.matrix(RP), CharacterPair("star", "trivial"), depth=10)
    assert o.tail_bound == 0 and o.assembled.is_zero()


def test_identity_matrix_is_not_constant():
    # the identity has unit det, yet d1(k k*) = N(k11) + N(k12) is not always a unit
    o = oracle_eval(RP, Representative.diagonal(0, 0).matrix(RP), TRIV)
    assert o.tail_bound == 0
    assert not equals(o.assembled, LaurentRational.one(2))
    assert equals(o.assembled, closed_form(RP, Representative.diagonal(0, 0), TRIV))


def test_oracle_histograms_frozen():
    # shell masses of v_E(d1) for H(0) on Q2(sqrt 2), frozen from the oracle run
    o = oracle_eval(RP, H0.matrix(RP), TRIV)
    outer, inner = o.histograms
    shells = {v: Fraction(2, 3) * (outer.mass(v) + inner.mass(v)) for v in range(1, 5)}
    assert shells == {1: Fraction(1, 3), 2: Fraction(1, 3), 3: Fraction(1, 6), 4: Fraction(1, 12)}


@pytest.mark.parametrize("ext", [RP, RU])
def test_first_row_brute_force(ext):
    """d1(k x) only sees the first row of k, a Haar-random primitive vector."""
    depth = 5
    reps = list(ext.residue_system(depth))
    checked = 0
    for rep in (H0, DP, Representative.diagonal(3, 0, True, False)):
        A = rep.matrix(ext)
        bound = _perturbation(ext, A, depth)
        for chi in CHARS:
            counts, total = Counter(), 0
            for x in reps:
                for y in reps:
                    if x.valuation() > 0 and y.valuation() > 0:
                        continue
                    total += 1
                    val = A.value(x, y)
                    v = val.valuation()
                    if v < bound - (ext.norm_depth if chi == "star" else 0):
                        counts[v] += 1 if chi == "trivial" else ext.chi_star(val)
            o = oracle_eval(ext, A, CharacterPair(chi, "trivial"))
            q = ext.q
            for v, c in counts.items():
                mass = Fraction(q, q + 1) * sum(h.mass(v) for h in o.histograms)
                assert mass == Fraction(c, total)
                checked += 1
    assert checked >= 6


def test_numeric_path_respects_bound():
    ext = with_precision(RP, 24)
    for rep in (H0, H1):
        o = oracle_eval(ext, rep.matrix(ext), TRIV, depth=14, closure=False)
        assert o.tail_bound > 0
        f = closed_form(ext, rep, TRIV)
        for z1, z2 in sample_points(ext.q, 20, 5):
            assert abs(eval_at(f, 2, z1, z2) - o.evaluate(z1, z2)) <= o.bound_at(z1, z2) + 1e-12


def test_compare_numeric_mode_reports():
    ext = with_precision(RP, 24)
    mode, ok, detail = compare(ext, H0, TRIV, 12, 5, 0, closure=False)
    assert mode == "numeric" and "tail bound" in detail


@pytest.mark.parametrize("ext", [RP, RU])
def test_functional_equations(ext):
    for rep in representative_table(ext, 5):
        assert functional_equation_check(ext, rep)
    assert not functional_equation_check(ext, H0, mutate=True)


def test_scaling():
    for ext in (RP, RU):
        for rep in (H0, DP, Representative.diagonal(3, 0)):
            for a in (ext.pi, ext.pi ** 2, ext.delta):
                for c1 in CHARS:
                    assert scaling_check(ext, rep, a, CharacterPair(c1, "star")) == (True, True)


def test_plane6_display_orders_agree():
    rep = Representative(Tag.PLANE6, 1)
    for c2 in CHARS:
        chars = CharacterPair("trivial", c2)
        a = plane6_derived_form(RP, 1, chars)
        assert equals(a, statement_form(RP, rep, chars))
        assert equals(sigma_swap(tilde(RP, a)), -tilde(RP, a))


def test_hyperbolic0_display_variants():
    for c2 in CHARS:
        chars = CharacterPair("trivial", c2)
        assert equals(hyperbolic0_derived_form(RP, chars), statement_form(RP, H0, chars))


def test_errors():
    with pytest.raises(RepNotInTable):
        closed_form(RP, Representative(Tag.PLANE4, 1), TRIV)
    with pytest.raises(WrongCase):
        closed_form(UNR, H0, TRIV)


def test_verify_all_rows():
    report = verify_all(RU)
    assert report.ok
    line = report.rows[0].line()
    assert line.count(" | ") == 4
    bad = verify_all(RU, mutate=True)
    assert not bad.ok
