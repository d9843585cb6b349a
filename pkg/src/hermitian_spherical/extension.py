"""Quadratic extensions F = E(sqrt d) of E = Q_p.

The extension object fixes every convention the later modules rely on:

* ``pi`` is the uniformizer of E *used in formulas*.  In the ramified cases
  it is N(varpi), so that pi is a norm and chi*(pi) = 1; in the unramified
  case it is p.  Element text (``pi^v*u``) always means powers of p.
* ``q`` is #E-bar.  In the ramified cases it is also #F-bar; in the
  unramified case #F-bar = q^2.
* Wild ramification is split into RP (s even) and RU (s odd); tame
  ramification uses s = 0, which makes the trace-image formula uniform.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterator

from .errors import PrecisionTooLow, SquareDefect, UnramifiedCase, ZeroInput
from .padic import INF, BaseElem, BaseField, Number


class Case(str, Enum):
    UNRAMIFIED = "Unramified"
    TAME = "TamelyRamified"
    RP = "RP"
    RU = "RU"

    @property
    def ramified(self) -> bool:
        return self is not Case.UNRAMIFIED

    @property
    def wild(self) -> bool:
        return self in (Case.RP, Case.RU)

    @property
    def lemma_case(self) -> int:
        """Numbering of the three cases in the measure lemma."""
        return {Case.UNRAMIFIED: 1, Case.TAME: 2, Case.RP: 3, Case.RU: 3}[self]


class ExtElem:
    """a + b*sqrt(d) with a, b in E."""

    __slots__ = ("ext", "a", "b")

    def __init__(self, ext: "QuadExt", a: BaseElem, b: BaseElem):
        self.ext = ext
        self.a = a
        self.b = b

    def _coerce(self, other: "ExtElem | Number") -> "ExtElem":
        if isinstance(other, ExtElem):
            return other
        return self.ext(other)

    def __add__(self, other: "ExtElem | Number") -> "ExtElem":
        y = self._coerce(other)
        return ExtElem(self.ext, self.a + y.a, self.b + y.b)

    __radd__ = __add__

    def __neg__(self) -> "ExtElem":
        return ExtElem(self.ext, -self.a, -self.b)

    def __sub__(self, other: "ExtElem | Number") -> "ExtElem":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "ExtElem | Number") -> "ExtElem":
        return self._coerce(other) - self

    def __mul__(self, other: "ExtElem | Number") -> "ExtElem":
        if not isinstance(other, ExtElem):
            c = self.ext.base(other)
            return ExtElem(self.ext, self.a * c, self.b * c)
        a, b, c, e = self.a, self.b, other.a, other.b
        return ExtElem(self.ext, a * c + self.ext.d * b * e, a * e + b * c)

    __rmul__ = __mul__

    def conjugate(self) -> "ExtElem":
        return ExtElem(self.ext, self.a, -self.b)

    def norm(self) -> BaseElem:
        return self.a * self.a - self.ext.d * self.b * self.b

    def trace(self) -> BaseElem:
        return self.a + self.a

    def inverse(self) -> "ExtElem":
        n = self.norm()
        if n.is_zero():
            raise ZeroInput("division by zero at precision")
        inv = n.inverse()
        return ExtElem(self.ext, self.a * inv, -self.b * inv)

    def __truediv__(self, other: "ExtElem | Number") -> "ExtElem":
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int) -> "ExtElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ext.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def valuation(self) -> int | float:
        """v_F, normalized so that v_F(varpi) = 1."""
        # v_E(N(x)) = v_F(x) when ramified and 2 v_F(x) when unramified; for a
        # zero at precision the result is again a lower bound.
        v = self.norm().valuation()
        if self.ext.case.ramified or v == INF:
            return v
        return v // 2

    def in_base(self) -> BaseElem:
        if not self.b.is_zero():
            raise ValueError(f"{self} does not lie in the base field")
        return self.a

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (ExtElem, BaseElem, int)):
            return NotImplemented
        return (self - self._coerce(other)).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ExtElem({self})"

    def __str__(self) -> str:
        if self.b.is_zero():
            return str(self.a)
        return f"({self.a}) + ({self.b})*sqrt({self.ext.d})"


def norm(x: ExtElem) -> BaseElem:
    return x.norm()


def trace(x: ExtElem) -> BaseElem:
    return x.trace()


def conjugate(x: ExtElem) -> ExtElem:
    return x.conjugate()


@dataclass(eq=False)
class QuadExt:
    """F = E(sqrt d) together with its ramification data.

    Build instances with :func:`make_quadratic_extension` or
    :func:`quadratic_extension`; the constructor does no validation.
    """

    base: BaseField
    d: BaseElem
    case: Case
    s: int | None
    uniformizer: ExtElem = field(init=False, repr=False)
    pi: BaseElem = field(init=False, repr=False)
    rho: int | None = field(init=False, default=None)
    residue_generator: ExtElem = field(init=False, repr=False)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def q(self) -> int:
        """#E-bar; equal to #F-bar when ramified."""
        return self.base.p

    @property
    def residue_size(self) -> int:
        """#F-bar."""
        return self.q if self.case.ramified else self.q * self.q

    @property
    def l(self) -> int | None:
        return None if self.s is None else self.s // 2

    @property
    def precision(self) -> int:
        return self.base.precision

    @property
    def norm_depth(self) -> int:
        """Unit classes modulo pi^norm_depth decide norm membership."""
        return self.s + 1 if self.case.wild else 1

    # -- element construction -------------------------------------------
    def __call__(self, a: "ExtElem | Number", b: Number = 0) -> ExtElem:
        if isinstance(a, ExtElem):
            return a
        return ExtElem(self, self.base(a), self.base(b))

    def one(self) -> ExtElem:
        return self(1)

    def zero(self) -> ExtElem:
        return self(0)

    @property
    def sqrt_d(self) -> ExtElem:
        return self(0, 1)

    @property
    def varpi(self) -> ExtElem:
        return self.uniformizer

    @property
    def delta(self) -> BaseElem | None:
        if self.rho is None:
            return None
        return 1 + self.rho * self.pi ** self.s

    @cached_property
    def eta(self) -> ExtElem | None:
        """The unit with conj(varpi)/varpi = 1 + eta * varpi^s."""
        if not self.case.ramified:
            return None
        w = self.uniformizer
        return (w.conjugate() / w - 1) / w ** self.s

    @cached_property
    def kappa(self) -> int | None:
        if not self.case.wild:
            return None
        return self.residue_of(self.eta)

    # -- residues and cells -----------------------------------------------
    @cached_property
    def residue_digits(self) -> tuple[ExtElem, ...]:
        """Representatives of F-bar, in a fixed order starting with 0."""
        if self.case.ramified:
            return tuple(self(r) for r in range(self.p))
        w = self.residue_generator
        return tuple(self(a) + w * b for b in range(self.p) for a in range(self.p))

    def residue_of(self, x: ExtElem) -> int:
        """Index of x mod varpi in residue_digits (x integral)."""
        for i, r in enumerate(self.residue_digits):
            if (x - r).valuation() >= 1:
                return i
        raise ValueError(f"{x} is not integral or known too coarsely")

    def residue_system(self, depth: int, start: int = 0) -> Iterator[ExtElem]:
        """Representatives of varpi^start O_F / varpi^depth O_F."""
        powers = [self.uniformizer ** i for i in range(start, depth)]
        digits = self.residue_digits
        for choice in itertools.product(range(len(digits)), repeat=depth - start):
            x = self.zero()
            for i, k in enumerate(choice):
                if k:
                    x = x + digits[k] * powers[i]
            yield x

    def trace_exponent(self, i: int | float) -> int | float:
        """j with Tr(varpi^i O_F) = pi^j O_E, for every case."""
        if i == INF:
            return INF
        if not self.case.ramified:
            return i
        s = self.s
        return s + 1 + (i - 1 - s) // 2

    def quadratic_exponent(self, i: int | float) -> int | float:
        """v_E(N(h)) lower bound for v_F(h) >= i."""
        return i if self.case.ramified else 2 * i

    # -- norms and the quadratic character -----------------------------------
    @cached_property
    def norm_residues(self) -> frozenset[int]:
        """Unit classes mod p^norm_depth that are norms of units of O_F."""
        k = self.norm_depth
        mod = self.p ** k
        found = set()
        for x in self.residue_system(2 * k):
            n = x.norm()
            if n.valuation() == 0:
                found.add(n.residue(k))
        return frozenset(found)

    def is_norm(self, e: BaseElem | Number) -> bool:
        e = self.base(e)
        if e.is_zero():
            raise ZeroInput("norm test of zero")
        v = e.valuation()
        if not self.case.ramified:
            return v % 2 == 0
        u = e / self.pi ** v
        return u.unit_residue(self.norm_depth) in self.norm_residues

    def chi_star(self, e: BaseElem | Number) -> int:
        e = self.base(e)
        if e.is_zero():
            return 0
        return 1 if self.is_norm(e) else -1

    def trace_image_exponent(self, i: int) -> int:
        if not self.case.ramified:
            raise UnramifiedCase("trace image exponent is defined for ramified extensions")
        return self.trace_exponent(i)

    def summary(self) -> str:
        parts = [self.case.value]
        if self.s is not None:
            parts += [f"s={self.s}", f"l={self.l}"]
        parts.append(f"q={self.q}")
        return ", ".join(parts)

    def describe(self) -> list[str]:
        lines = [
            self.summary(),
            f"d = {self.d}",
            f"varpi = {self.uniformizer}",
            f"pi = N(varpi) = {self.pi}" if self.case.ramified else f"pi = {self.pi}",
            f"#F-bar = {self.residue_size}",
        ]
        if self.rho is not None:
            lines.append(f"rho = {self.rho}, Delta = 1 + rho*pi^{self.s} = {self.delta}")
        if self.kappa is not None:
            lines.append(f"kappa = {self.kappa}")
        lines.append(f"precision = {self.precision}")
        return lines


def _is_square_unit(u: int, p: int) -> bool:
    if p == 2:
        return u % 8 == 1
    return pow(u % p, (p - 1) // 2, p) == 1


def make_quadratic_extension(base: BaseField, d: BaseElem | Number) -> QuadExt:
    d = base(d)
    if d.is_zero():
        raise SquareDefect("d = 0 does not define a quadratic extension")
    p = base.p
    v = d.valuation()
    d0 = d / base.uniformizer_power(2 * (v // 2))
    odd = v % 2 == 1
    if not odd:
        needed = 3 if p == 2 else 1
        if d0.prec < needed:
            raise PrecisionTooLow("not enough digits to decide whether d is a square")
        if _is_square_unit(d0.unit, p):
            raise SquareDefect(f"{d} is a square in Q_{p}")

    if odd:
        case = Case.RP if p == 2 else Case.TAME
    elif p == 2 and d0.unit % 4 == 3:
        case = Case.RU
    else:
        case = Case.UNRAMIFIED

    ext = QuadExt(base, d0, case, None)
    if case is Case.UNRAMIFIED:
        ext.uniformizer = ext(p)
        ext.pi = base(p)
        ext.residue_generator = ext(base(1) / 2, base(1) / 2) if p == 2 else ext.sqrt_d
        return ext

    # varpi = sqrt(d) when v(d) is odd; for RU, d = 1 + delta*2 and
    # varpi = 1 + sqrt(d) (the k = 0 instance of (1 + sqrt(1+delta pi^(2k+1)))/pi^k).
    ext.uniformizer = ext.sqrt_d if odd else ext(1, 1)
    ext.residue_generator = ext.one()
    w = ext.uniformizer
    ext.pi = w.norm()
    ext.s = int((w.conjugate() / w - 1).valuation())
    if case.wild and base.precision < 2 * (ext.s + 3):
        raise PrecisionTooLow(f"precision {base.precision} < 2(s+3) = {2 * (ext.s + 3)}")
    for rho in range(1, p ** (ext.s + 1) + 1):
        if not ext.is_norm(1 + rho * ext.pi ** ext.s):
            ext.rho = rho
            break
    return ext


def quadratic_extension(p: int, d: int, precision: int | None = None) -> QuadExt:
    """Convenience constructor; precision defaults to 4(s+3) digits."""
    if precision is not None:
        return make_quadratic_extension(BaseField(p, precision), d)
    probe = make_quadratic_extension(BaseField(p, 64), d)
    s = probe.s or 0
    return make_quadratic_extension(BaseField(p, max(4 * (s + 3), 12)), d)
