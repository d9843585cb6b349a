"""Truncated arithmetic in the p-adic base field E = Q_p.

Elements are stored in capped-relative form: a valuation, a unit known
modulo p^prec, and the number prec of known digits.  Cancellation in a sum
lowers prec honestly, so a result that has lost all its digits becomes a
*zero at precision*: its ``val`` then records the absolute precision, i.e.
the element is only known to lie in p^val Z_p.  Exact zero has val = inf.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import PrecisionTooLow, ZeroInput

INF = math.inf

Number = Union[int, Fraction, "BaseElem"]


def int_valuation(n: int, p: int) -> int | float:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class BaseField:
    """Q_p with a working relative precision of ``precision`` digits."""

    p: int
    precision: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @property
    def q(self) -> int:
        return self.p

    def __call__(self, x: Number) -> "BaseElem":
        if isinstance(x, BaseElem):
            if x.field != self:
                raise ValueError("element belongs to a different base field")
            return x
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return self._from_fraction(x, 1)
        if isinstance(x, Fraction):
            return self._from_fraction(x.numerator, x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self}")

    def _from_fraction(self, num: int, den: int) -> "BaseElem":
        if num == 0:
            return self.zero()
        p, n = self.p, self.precision
        vn, vd = int_valuation(num, p), int_valuation(den, p)
        num //= p ** vn
        den //= p ** vd
        mod = p ** n
        return BaseElem(self, vn - vd, num * pow(den, -1, mod) % mod, n)

    def zero(self, absprec: int | float = INF) -> "BaseElem":
        return BaseElem(self, absprec, 0, 0)

    def one(self) -> "BaseElem":
        return self(1)

    def uniformizer_power(self, v: int, unit: int = 1) -> "BaseElem":
        """The element p^v * unit (unit must be prime to p)."""
        if unit % self.p == 0:
            raise ValueError("unit part must be prime to p")
        mod = self.p ** self.precision
        return BaseElem(self, v, unit % mod, self.precision)

    def parse(self, text: str) -> "BaseElem":
        """Read ``pi^v*u``, ``pi^v``, ``u`` or ``-pi^v*u`` (here pi means p)."""
        t = text.replace(" ", "")
        m = re.fullmatch(r"(-)?(?:pi(?:\^\(?(-?\d+)\)?)?(?:\*(-?\d+))?|(-?\d+))", t)
        if not m or t in ("", "-"):
            raise ValueError(f"cannot parse base-field element {text!r}")
        sign, v, u, plain = m.groups()
        if plain is not None:
            value = self(int(plain))
        else:
            exp = int(v) if v is not None else 1
            unit = int(u) if u is not None else 1
            if unit == 0:
                return self.zero()
            w = int_valuation(unit, self.p)
            value = self.uniformizer_power(exp + w, unit // self.p ** w)
        return -value if sign else value


class BaseElem:
    """An element p^val * unit of E, with ``prec`` known unit digits."""

    __slots__ = ("field", "val", "unit", "prec")

    def __init__(self, field: BaseField, val: int | float, unit: int, prec: int):
        self.field = field
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- structure -------------------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    def is_zero(self) -> bool:
        """True for exact zero and for zero-at-precision."""
        return self.prec == 0

    def is_exact_zero(self) -> bool:
        return self.prec == 0 and self.val == INF

    @property
    def absprec(self) -> int | float:
        return self.val + self.prec

    def valuation(self) -> int | float:
        """v_E(self); for a zero at precision this is only a lower bound."""
        return self.val

    def is_unit(self) -> bool:
        return self.prec > 0 and self.val == 0

    def unit_part(self) -> "BaseElem":
        if self.is_zero():
            raise ZeroInput("zero has no unit part")
        return BaseElem(self.field, 0, self.unit, self.prec)

    def unit_residue(self, k: int) -> int:
        """The unit part modulo p^k, in [0, p^k)."""
        if self.is_zero():
            raise ZeroInput("zero has no unit part")
        if k > self.prec:
            raise PrecisionTooLow(f"need {k} unit digits, only {self.prec} known")
        return self.unit % self.p ** k

    def residue(self, k: int) -> int:
        """self modulo p^k as an integer in [0, p^k); self must be integral."""
        if self.is_zero():
            if self.val < k:
                raise PrecisionTooLow(f"zero known only modulo p^{self.val}")
            return 0
        if self.val < 0:
            raise ValueError("element is not integral")
        if self.val >= k:
            return 0
        if self.absprec < k:
            raise PrecisionTooLow(f"element known only modulo p^{self.absprec}")
        return self.unit * self.p ** self.val % self.p ** k

    def lift(self) -> Fraction:
        """A rational number representing self (symmetric unit lift)."""
        if self.is_zero():
            return Fraction(0)
        mod = self.p ** self.prec
        u = self.unit - mod if 2 * self.unit > mod else self.unit
        return Fraction(u) * Fraction(self.p) ** self.val

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other: Number) -> "BaseElem":
        return self.field(other)

    def __add__(self, other: Number) -> "BaseElem":
        y = self._coerce(other)
        x = self
        if x.is_exact_zero():
            return y
        if y.is_exact_zero():
            return x
        p = x.p
        absprec = min(x.absprec, y.absprec)
        m = min(x.val, y.val)
        if m >= absprec:
            return BaseElem(x.field, absprec, 0, 0)
        total = 0
        if x.prec:
            total += x.unit * p ** (x.val - m)
        if y.prec:
            total += y.unit * p ** (y.val - m)
        rel = absprec - m
        total %= p ** rel
        if total == 0:
            return BaseElem(x.field, absprec, 0, 0)
        k = 0
        while total % p == 0:
            total //= p
            k += 1
        return BaseElem(x.field, m + k, total, rel - k)

    __radd__ = __add__

    def __neg__(self) -> "BaseElem":
        if self.prec == 0:
            return self
        return BaseElem(self.field, self.val, -self.unit % self.p ** self.prec, self.prec)

    def __sub__(self, other: Number) -> "BaseElem":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Number) -> "BaseElem":
        return self._coerce(other) + (-self)

    def __mul__(self, other: Number) -> "BaseElem":
        y = self._coerce(other)
        x = self
        if x.prec == 0 or y.prec == 0:
            if x.is_exact_zero() or y.is_exact_zero():
                return x.field.zero()
            # a zero known modulo p^a times p^w * unit is known modulo p^(a+w)
            return BaseElem(x.field, x.val + y.val, 0, 0)
        prec = min(x.prec, y.prec)
        return BaseElem(x.field, x.val + y.val, x.unit * y.unit % x.p ** prec, prec)

    __rmul__ = __mul__

    def inverse(self) -> "BaseElem":
        if self.prec == 0:
            raise ZeroInput("division by zero at precision")
        mod = self.p ** self.prec
        return BaseElem(self.field, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other: Number) -> "BaseElem":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> "BaseElem":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "BaseElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison and display -----------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (BaseElem, int, Fraction)):
            return NotImplemented
        return (self - self._coerce(other)).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"BaseElem({self})"

    def __str__(self) -> str:
        if self.prec == 0:
            return "0" if self.val == INF else f"O(pi^{self.val})"
        mod = self.p ** self.prec
        u = self.unit - mod if 2 * self.unit > mod else self.unit
        if self.val == 0:
            return str(u)
        return f"pi^{self.val}*{u}"

