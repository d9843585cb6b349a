"""Integrals over O_F of characters and powers of |eta + N(x)|.

Each quantity comes twice: as the closed rational function and as the
cell-enumeration histogram assembled into a rational function, so tests
can compare the two exactly.
"""
from __future__ import annotations

import warnings
from fractions import Fraction

from .cells import (
    UNITS,
    Cell,
    QuadraticIntegrand,
    ShellHistogram,
    enumerate_cells,
    integrate_quadratic,
)
from .errors import LemmaHypothesisWarning, WrongCase
from .extension import QuadExt
from .laurent import LaurentRational, qpow
from .padic import BaseElem, Number


def shell_variable(ext: QuadExt) -> LaurentRational:
    """The factor contributed by one step of E-valuation to |y|^s1.

    Ramified: |y| = q^(-2 v_E(y)), so the step is q^(-2 s1) = u^4 t1^2 t2^-2.
    Unramified: the case-1 integral is written with q^(-s1) per step.
    """
    if ext.case.ramified:
        return qpow(ext.q, 1, 2, -2)
    return qpow(ext.q, Fraction(1, 2), 1, -1)


def character_integral(ext: QuadExt, theta: BaseElem | Number, m: int,
                       domain: str = "O_F") -> Fraction:
    """Integral of chi*(1 + theta pi^m N(x)) over O_F or over O_F^*."""
    if not ext.case.wild:
        raise WrongCase("the character lemmas concern wildly ramified extensions")
    theta = ext.base(theta)
    s = ext.s
    if domain == "O_F":
        in_range = 0 < m < s + 1
        start = [Cell(ext.zero(), 0, Fraction(1))]
    elif domain == "units":
        in_range = 0 < m < s
        start = list(enumerate_cells(ext, UNITS, 1))
    else:
        raise ValueError(f"unknown domain {domain!r}")
    if not in_range or not theta.is_unit():
        warnings.warn(f"m={m} on {domain} is outside the range where vanishing is proved",
                      LemmaHypothesisWarning, stacklevel=2)
    f = QuadraticIntegrand(ext.base(1), ext.zero(), theta * ext.pi ** m)
    if in_range and theta.is_unit():
        # plain enumeration: the integrand is constant on cosets of varpi^(s+1-m)
        hist = integrate_quadratic(ext, f, start, char="star", depth_cap=s + 1 - m, closure=False)
        if hist.unresolved:
            raise AssertionError("integrand not constant on cosets of varpi^(s+1-m)")
    else:
        hist = integrate_quadratic(ext, f, start, char="star",
                                   depth_cap=min(ext.precision, 2 * s + 8))
        if hist.unresolved:
            raise AssertionError("character integral left unresolved cells")
    return hist.total()


def norm_shell_histogram(ext: QuadExt, eta: BaseElem | Number, depth_cap: int | None = None) -> ShellHistogram:
    """Histogram of v_E(eta + N(x)) over x in O_F."""
    eta = ext.base(eta)
    if not eta.is_unit():
        raise ValueError("eta must be a unit")
    f = QuadraticIntegrand(eta, ext.zero(), ext.base(1))
    cap = depth_cap if depth_cap is not None else min(ext.precision, 2 * (ext.s or 0) + 8)
    return integrate_quadratic(ext, f, [Cell(ext.zero(), 0, Fraction(1))], depth_cap=cap)


def norm_integral_assembled(ext: QuadExt, eta: BaseElem | Number) -> LaurentRational:
    hist = norm_shell_histogram(ext, eta)
    if hist.unresolved:
        raise AssertionError("norm integral left unresolved cells")
    return hist.assemble(shell_variable(ext))


def integral_lemma_closed(ext: QuadExt, chi_star_of_minus_eta: int) -> LaurentRational:
    """Closed form of the integral of |eta + N(x)|^s1 over O_F (wild case)."""
    if not ext.case.wild:
        raise WrongCase("closed form is stated for wildly ramified extensions")
    sign = chi_star_of_minus_eta
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    s, q = ext.s, ext.q
    num = (qpow(q, 0, 0, 2) - qpow(q, -1, 0, 2)
           + sign * (qpow(q, 0, 2 * s + 2, -2 * s) - qpow(q, -1, 2 * s, 2 - 2 * s)))
    return num / (qpow(q, 0, 0, 2) - qpow(q, 0, 2, 0))


def case1_integral_closed(ext_or_q: QuadExt | int) -> LaurentRational:
    """Closed form of the integral of |1 + N(x)|^s1 over O_F, unramified case."""
    if isinstance(ext_or_q, QuadExt):
        if ext_or_q.case.ramified:
            raise WrongCase("the case-1 integral needs an unramified extension")
        q = ext_or_q.q
    else:
        q = ext_or_q
    y = qpow(q, Fraction(-1, 2), 1, -1)  # q^(-s1-1)
    q = Fraction(q)
    return (q * q - q - 1) / q ** 2 + (q * q - 1) / q ** 2 * y / (1 - y)
