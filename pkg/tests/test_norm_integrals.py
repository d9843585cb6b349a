from __future__ import annotations

import random
import warnings
from fractions import Fraction

import pytest

from hermitian_spherical.errors import LemmaHypothesisWarning, WrongCase
from hermitian_spherical.extension import quadratic_extension
from hermitian_spherical.laurent import equals, eval_at
from hermitian_spherical.norm_integrals import (
    case1_integral_closed,
    character_integral,
    integral_lemma_closed,
    norm_integral_assembled,
    norm_shell_histogram,
)

RP = quadratic_extension(2, 2)
RU = quadratic_extension(2, -5)
RP6 = quadratic_extension(2, 6)
RU3 = quadratic_extension(2, 3)
UNR = quadratic_extension(2, 5)
UNR3 = quadratic_extension(3, 2)


def thetas(ext):
    return [ext.base(u) for u in range(1, ext.p ** (ext.s + 1)) if u % ext.p]


@pytest.mark.parametrize("ext", [RP, RU, RP6, RU3])
def test_character_integrals_vanish_in_range(ext):
    for th in thetas(ext):
        for m in range(1, ext.s + 1):
            assert character_integral(ext, th, m, "O_F") == 0
        for m in range(1, ext.s):
            assert character_integral(ext, th, m, "units") == 0


def test_character_integral_boundaries():
    # just outside the hypotheses the integrals do not vanish
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LemmaHypothesisWarning)
        assert character_integral(RP, 1, RP.s + 1, "O_F") == 1
        assert character_integral(RP, 1, RP.s, "units") == Fraction(-1, 2)
        assert character_integral(RP, 1, RP.s + 1, "units") == Fraction(1, 2)


def test_character_integral_warns_out_of_range():
    with pytest.warns(LemmaHypothesisWarning):
        character_integral(RP, 1, 0, "O_F")


def test_character_integral_wrong_case():
    with pytest.raises(WrongCase):
        character_integral(UNR, 1, 1)


@pytest.mark.parametrize("ext", [RP, RU, RP6, RU3])
def test_integral_lemma_both_signs(ext):
    signs = {}
    for eta in (ext.base(1), ext.delta, ext.base(-1), ext.base(3)):
        sign = ext.chi_star(-eta)
        assembled = norm_integral_assembled(ext, eta)
        assert equals(assembled, integral_lemma_closed(ext, sign))
        assert not equals(assembled, integral_lemma_closed(ext, -sign))
        signs[sign] = True
    assert set(signs) == {1, -1}


@pytest.mark.parametrize("ext", [UNR, UNR3])
def test_case1_integral(ext):
    assert equals(norm_integral_assembled(ext, 1), case1_integral_closed(ext))


def test_shell_histograms_frozen():
    # frozen from the enumeration
    h = norm_shell_histogram(UNR, 1)
    assert h.entries == {0: Fraction(1, 4)}
    assert (h.tail.start, h.tail.first, h.tail.ratio) == (1, Fraction(3, 8), Fraction(1, 2))
    h = norm_shell_histogram(UNR3, 1)
    assert h.entries == {0: Fraction(5, 9)}
    assert (h.tail.start, h.tail.first, h.tail.ratio) == (1, Fraction(8, 27), Fraction(1, 3))


def test_integral_lemma_numeric_samples():
    rng = random.Random(7)
    for ext in (RP, RU):
        for eta in (ext.base(1), ext.delta):
            a = norm_integral_assembled(ext, eta)
            c = integral_lemma_closed(ext, ext.chi_star(-eta))
            for _ in range(20):
                z2 = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
                z1 = z2 - 0.5 - complex(rng.uniform(0.05, 1.95), rng.uniform(-2, 2))
                x, y = eval_at(a, ext.q, z1, z2), eval_at(c, ext.q, z1, z2)
                assert abs(x - y) <= 1e-10 * max(1.0, abs(y))
