"""Laurent rational functions in u = q^(1/4), t1 = q^z1, t2 = q^z2.

Every closed form in this package is a ratio of Laurent polynomials in
these three symbols with rational coefficients.  Because the coefficients
already contain numeric powers of q, u is not a free symbol: a function
that knows its q reduces u-exponents with u^k = q^(k/4), k the least of
1, 2, 4 making the right side rational.  Equality is decided by
cross-multiplication, so no polynomial gcd is ever needed; the canonical
form only scales the denominator to a monic, exponent-shifted shape so
printed output is stable.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import DivisionByZero, PoleAtPoint

Exponent = tuple[int, int, int]  # (u, t1, t2)
Scalar = Union[int, Fraction]


@dataclass(frozen=True, order=True)
class Monomial:
    cu: int
    c1: int
    c2: int
    coeff: Fraction = Fraction(1)

    @property
    def exponent(self) -> Exponent:
        return (self.cu, self.c1, self.c2)


class LaurentPoly:
    """Finite sum of coeff * u^a * t1^b * t2^c, stored as a dict."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Exponent, Scalar] | None = None):
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            if c:
                clean[e] = Fraction(c)
        self.terms = clean

    @classmethod
    def const(cls, c: Scalar) -> "LaurentPoly":
        return cls({(0, 0, 0): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[Exponent, Fraction] = {}
        for (a1, b1, c1), x in self.terms.items():
            for (a2, b2, c2), y in other.terms.items():
                e = (a1 + a2, b1 + b2, c1 + c2)
                out[e] = out.get(e, 0) + x * y
        return LaurentPoly(out)

    def scale(self, c: Scalar) -> "LaurentPoly":
        return LaurentPoly({e: c * v for e, v in self.terms.items()})

    def shift(self, e: Exponent) -> "LaurentPoly":
        return LaurentPoly({(a + e[0], b + e[1], c + e[2]): v for (a, b, c), v in self.terms.items()})

    def reduce(self, q: int | None) -> "LaurentPoly":
        """Rewrite u^k as the rational number q^(k/4) (see module docstring)."""
        if q is None:
            return self
        k, root = _u_relation(q)
        out: dict[Exponent, Fraction] = {}
        for (a, b, c), v in self.terms.items():
            e = (a % k, b, c)
            out[e] = out.get(e, 0) + v * Fraction(root) ** (a // k)
        return LaurentPoly(out)

    def swap(self) -> "LaurentPoly":
        return LaurentPoly({(a, c, b): v for (a, b, c), v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def monomials(self) -> list[Monomial]:
        return [Monomial(*e, coeff=c) for e, c in sorted(self.terms.items(), reverse=True)]

    def evaluate(self, logq: float, z1: complex, z2: complex) -> complex:
        total = 0j
        for (a, b, c), v in self.terms.items():
            total += float(v) * cmath.exp(logq * (a / 4 + b * z1 + c * z2))
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(_format_monomial(m) for m in self.monomials()).replace("+ -", "- ")


def _u_relation(q: int) -> tuple[int, Fraction]:
    """(k, q^(k/4)) for the least k in (1, 2, 4) with q^(k/4) rational."""
    for k in (1, 2):
        r = round(q ** (k / 4))
        if r > 0 and r ** (4 // k) == q:
            return k, Fraction(r)
    return 4, Fraction(q)


def _merge_q(a: int | None, b: int | None) -> int | None:
    if a is not None and b is not None and a != b:
        raise ValueError(f"cannot combine functions of q={a} and q={b}")
    return a if a is not None else b


def _format_monomial(m: Monomial) -> str:
    factors = [f"{name}^{k}" if k != 1 else name
               for name, k in (("u", m.cu), ("t1", m.c1), ("t2", m.c2)) if k]
    if not factors:
        return str(m.coeff)
    if m.coeff == 1:
        return "*".join(factors)
    if m.coeff == -1:
        return "-" + "*".join(factors)
    return f"{m.coeff}*" + "*".join(factors)


class LaurentRational:
    """num / den with num, den Laurent polynomials, den structurally nonzero.

    ``q`` is the residue-field size the function refers to, or None for a
    function that does not involve u.
    """

    __slots__ = ("num", "den", "q")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None, q: int | None = None):
        den = LaurentPoly.const(1) if den is None else den
        num, den = num.reduce(q), den.reduce(q)
        if den.is_zero():
            raise DivisionByZero("denominator is the zero polynomial")
        self.num, self.den = _canonical(num, den)
        self.q = q

    # -- constructors ----------------------------------------------------
    @classmethod
    def const(cls, c: Scalar, q: int | None = None) -> "LaurentRational":
        return cls(LaurentPoly.const(c), q=q)

    @classmethod
    def zero(cls, q: int | None = None) -> "LaurentRational":
        return cls(LaurentPoly(), q=q)

    @classmethod
    def one(cls, q: int | None = None) -> "LaurentRational":
        return cls.const(1, q)

    @classmethod
    def monomial(cls, cu: int = 0, c1: int = 0, c2: int = 0, coeff: Scalar = 1,
                 q: int | None = None) -> "LaurentRational":
        return cls(LaurentPoly({(cu, c1, c2): coeff}), q=q)

    @classmethod
    def from_terms(cls, terms: Iterable[Monomial], q: int | None = None) -> "LaurentRational":
        poly = LaurentPoly()
        for m in terms:
            poly = poly + LaurentPoly({m.exponent: m.coeff})
        return cls(poly, q=q)

    # -- arithmetic ------------------------------------------------------
    def _lift(self, x: "LaurentRational | Scalar") -> "LaurentRational":
        return x if isinstance(x, LaurentRational) else LaurentRational.const(x, self.q)

    def __add__(self, other: "LaurentRational | Scalar") -> "LaurentRational":
        o = self._lift(other)
        q = _merge_q(self.q, o.q)
        if self.den == o.den:
            return LaurentRational(self.num + o.num, self.den, q)
        return LaurentRational(self.num * o.den + o.num * self.den, self.den * o.den, q)

    __radd__ = __add__

    def __neg__(self) -> "LaurentRational":
        return LaurentRational(-self.num, self.den, self.q)

    def __sub__(self, other: "LaurentRational | Scalar") -> "LaurentRational":
        return self + (-self._lift(other))

    def __rsub__(self, other: "LaurentRational | Scalar") -> "LaurentRational":
        return self._lift(other) - self

    def __mul__(self, other: "LaurentRational | Scalar") -> "LaurentRational":
        o = self._lift(other)
        return LaurentRational(self.num * o.num, self.den * o.den, _merge_q(self.q, o.q))

    __rmul__ = __mul__

    def __truediv__(self, other: "LaurentRational | Scalar") -> "LaurentRational":
        o = self._lift(other)
        if o.num.is_zero():
            raise DivisionByZero("division by the zero function")
        return LaurentRational(self.num * o.den, self.den * o.num, _merge_q(self.q, o.q))

    def __rtruediv__(self, other: "LaurentRational | Scalar") -> "LaurentRational":
        return self._lift(other) / self

    def __pow__(self, n: int) -> "LaurentRational":
        if n < 0:
            return (self.one(self.q) / self) ** (-n)
        out = self.one(self.q)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def with_q(self, q: int) -> "LaurentRational":
        return LaurentRational(self.num, self.den, _merge_q(self.q, q))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentRational.const(other)
        if not isinstance(other, LaurentRational):
            return NotImplemented
        return equals(self, other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"LaurentRational({self})"

    def __str__(self) -> str:
        if self.den == LaurentPoly.const(1):
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def records(self) -> dict:
        """Machine form: exponent triples with rational coefficient pairs."""
        def rows(poly: LaurentPoly) -> list[list]:
            return [[m.coeff.numerator, m.coeff.denominator, m.cu, m.c1, m.c2]
                    for m in poly.monomials()]
        return {"q": self.q, "num": rows(self.num), "den": rows(self.den)}


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return num, LaurentPoly.const(1)
    lead_e, lead_c = max(den.terms.items())
    inv_shift = (0, -lead_e[1], -lead_e[2])
    num = num.shift(inv_shift).scale(1 / lead_c)
    den = den.shift(inv_shift).scale(1 / lead_c)
    return num, den


def qpow(q: int, const: Scalar = 0, z1: int = 0, z2: int = 0, coeff: Scalar = 1) -> LaurentRational:
    """coeff * q^(const + z1*z1 + z2*z2); const must be a multiple of 1/4."""
    cu = Fraction(const) * 4
    if cu.denominator != 1:
        raise ValueError(f"q-exponent {const} is not on the quarter-integer grid")
    return LaurentRational.monomial(int(cu), z1, z2, coeff, q=q)


def sigma_swap(f: LaurentRational) -> LaurentRational:
    """Exchange t1 and t2."""
    return LaurentRational(f.num.swap(), f.den.swap(), f.q)


def sigma_sum(f: LaurentRational) -> LaurentRational:
    return f + sigma_swap(f)


def equals(f: LaurentRational, g: LaurentRational) -> bool:
    q = _merge_q(f.q, g.q)
    return (f.num * g.den - g.num * f.den).reduce(q).is_zero()


def eval_at(f: LaurentRational, q: int, z1: complex, z2: complex) -> complex:
    q = _merge_q(f.q, q)
    logq = math.log(q)
    den = f.den.evaluate(logq, z1, z2)
    if abs(den) < 1e-12:
        raise PoleAtPoint(f"denominator vanishes at z = ({z1}, {z2})")
    return f.num.evaluate(logq, z1, z2) / den
