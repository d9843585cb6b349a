"""Haar-measure bookkeeping on O_F by residue cells.

A cell is a coset center + varpi^D O_F with measure (#F-bar)^(-D).  The
central tool is :func:`integrate_quadratic`, which computes the shell
histogram of an integrand of the shape

    Q(w) = alpha + Tr(lam * w) + beta * N(w)

over a union of cells, for the trivial character or for chi*.  On a cell
w0 + varpi^D O_F one has Q(w0 + h) = Q(w0) + Tr(lam_0 h) + beta N(h) with
lam_0 = lam + beta * conj(w0).  A cell is finished by one of two rules:

* valuation rule: v(Q(w0)) is below every possible perturbation, so the
  valuation (and, with nd more digits of room, the norm class) of Q is
  constant on the cell;
* linear rule: the trace term dominates the norm term at every scale
  inside the cell.  Then Q maps the cell onto the ball Q(w0) + pi^J O_E
  and pushes the cell measure forward to a multiple of Haar measure (the
  fibres of every truncation have equal size, by induction on the level
  exactly as for a surjective homomorphism), so the cell integral is an
  integral over a ball of E, done in closed form.

Anything else is subdivided; cells still open at the depth cap are kept as
an explicit unresolved remainder, never dropped.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Literal, Sequence

from .errors import DepthExceedsPrecision, PrecisionTooLow
from .extension import ExtElem, QuadExt
from .laurent import LaurentRational
from .padic import INF, BaseElem

Character = Literal["trivial", "star"]


@dataclass(frozen=True)
class Cell:
    center: ExtElem
    depth: int
    measure: Fraction


@dataclass(frozen=True)
class Domain:
    """The coset center + varpi^k O_F, optionally restricted to units."""

    center_digits: tuple[int, ...] = ()
    units_only: bool = False

    @property
    def level(self) -> int:
        return len(self.center_digits)


O_F = Domain()
VARPI_O_F = Domain((0,))
UNITS = Domain(units_only=True)


def coset(digits: Sequence[int]) -> Domain:
    """c + varpi^k O_F with c = sum digits[i] * varpi^i, k = len(digits)."""
    return Domain(tuple(digits))


def _check_depth(ext: QuadExt, depth: int) -> None:
    if depth > ext.precision:
        raise DepthExceedsPrecision(f"depth {depth} exceeds the precision budget {ext.precision}")


def enumerate_cells(ext: QuadExt, domain: Domain, depth: int) -> Iterator[Cell]:
    """Partition of the domain into cells of the given depth, in digit order."""
    _check_depth(ext, depth)
    if depth < domain.level:
        raise ValueError("depth is coarser than the domain")
    digits = ext.residue_digits
    varpi = ext.uniformizer
    measure = Fraction(1, ext.residue_size ** depth)
    base = ext.zero()
    power = ext.one()
    for k in domain.center_digits:
        base = base + digits[k] * power
        power = power * varpi
    for tail in ext.residue_system(depth, start=domain.level):
        center = base + tail
        if domain.units_only and domain.level == 0 and center.valuation() > 0:
            continue
        yield Cell(center, depth, measure)


# -- histograms --------------------------------------------------------------

@dataclass(frozen=True)
class GeometricTail:
    """Shell v >= start carries mass first * ratio^(v - start)."""

    start: int
    first: Fraction
    ratio: Fraction


@dataclass
class ShellHistogram:
    """Mass (or chi-signed mass) of each valuation shell of an integrand.

    ``unresolved`` maps a valuation lower bound to the measure of cells left
    open at the depth cap whose integrand valuation is at least that bound.
    """

    entries: dict[int, Fraction] = field(default_factory=dict)
    tail: GeometricTail | None = None
    unresolved: dict[int, Fraction] = field(default_factory=dict)
    signed: bool = False
    depth: int = 0
    cells: int = 0

    def mass(self, v: int) -> Fraction:
        m = self.entries.get(v, Fraction(0))
        t = self.tail
        if t is not None and v >= t.start:
            m += t.first * t.ratio ** (v - t.start)
        return m

    def total(self) -> Fraction:
        """Sum of all shells (the integral of chi at s1 = 0)."""
        s = sum(self.entries.values(), Fraction(0))
        if self.tail is not None:
            s += self.tail.first / (1 - self.tail.ratio)
        return s

    @property
    def residual(self) -> Fraction:
        return sum(self.unresolved.values(), Fraction(0))

    def assemble(self, x: LaurentRational) -> LaurentRational:
        """sum_v mass(v) x^v, with the geometric tail closed up."""
        out = LaurentRational.zero(x.q)
        for v, m in sorted(self.entries.items()):
            if m:
                out = out + x ** v * m
        t = self.tail
        if t is not None and t.first:
            out = out + x ** t.start * t.first / (1 - x * t.ratio)
        return out

    def evaluate(self, x: complex) -> complex:
        total = sum((complex(m) * x ** v for v, m in self.entries.items()), 0j)
        t = self.tail
        if t is not None and t.first:
            total += complex(t.first) * x ** t.start / (1 - complex(t.ratio) * x)
        return total

    def bound(self, xabs: float) -> float:
        """Upper bound for |contribution of unresolved cells| when |x| <= 1."""
        return sum(float(m) * xabs ** v for v, m in self.unresolved.items())

    def lines(self) -> list[str]:
        out = [f"{v}: {m}" for v, m in sorted(self.entries.items())]
        if self.tail is not None:
            t = self.tail
            out.append(f"tail: v >= {t.start}: {t.first} * ({t.ratio})^(v-{t.start})")
        if self.unresolved:
            out.append(f"unresolved at depth {self.depth}: measure {self.residual}, "
                       f"valuation >= {min(self.unresolved)}")
        return out


class _Accumulator:
    """Collects entries, geometric tails (one ratio) and unresolved mass."""

    def __init__(self, ratio: Fraction):
        self.entries: Counter = Counter()
        self.tails: Counter = Counter()
        self.ratio = ratio
        self.unresolved: Counter = Counter()

    def histogram(self, signed: bool, depth: int, cells: int) -> ShellHistogram:
        tails = {k: v for k, v in self.tails.items() if v}
        entries = Counter(self.entries)
        tail = None
        if tails:
            top = max(tails)
            first = Fraction(0)
            for start, m in tails.items():
                for v in range(start, top):
                    entries[v] += m * self.ratio ** (v - start)
                first += m * self.ratio ** (top - start)
            tail = GeometricTail(top, first, self.ratio)
        return ShellHistogram(
            entries={v: Fraction(m) for v, m in sorted(entries.items()) if m},
            tail=tail,
            unresolved={v: Fraction(m) for v, m in sorted(self.unresolved.items()) if m},
            signed=signed,
            depth=depth,
            cells=cells,
        )


# -- integrands ---------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticIntegrand:
    """w -> alpha + Tr(lam * w) + beta * N(w)."""

    alpha: BaseElem
    lam: ExtElem
    beta: BaseElem

    def __call__(self, w: ExtElem) -> BaseElem:
        return self.alpha + (self.lam * w).trace() + self.beta * w.norm()

    def linear_part(self, w0: ExtElem) -> ExtElem:
        return self.lam + w0.conjugate() * self.beta


def _ball_integral(ext: QuadExt, c: BaseElem, J: int, char: Character,
                   weight: Fraction, acc: _Accumulator) -> None:
    """Add weight * q^J * integral over c + pi^J O_E of chi(y) x^v(y) dy."""
    q = ext.q
    weight = weight * q ** J
    nd = ext.norm_depth
    if c.valuation() >= J:
        if c.is_zero() and c.valuation() < J:
            raise PrecisionTooLow("cannot tell whether the image ball contains 0")
        # shells v >= J of pi^J O_E, each of Haar measure (1 - 1/q) q^-v
        unit_avg = Fraction(1) if char == "trivial" else _unit_character_average(ext)
        chi_pi = 1 if char == "trivial" else ext.chi_star(ext.pi)
        acc.tails[J] += weight * unit_avg * chi_pi ** J * (1 - Fraction(1, q)) / Fraction(q) ** J
        return
    v = int(c.valuation())
    if char == "trivial":
        acc.entries[v] += weight / Fraction(q) ** J
        return
    if J - v >= nd:
        acc.entries[v] += weight * ext.chi_star(c) / Fraction(q) ** J
        return
    if c.absprec < v + nd:
        raise PrecisionTooLow("image ball center known too coarsely for its norm class")
    k = v + nd - J
    p_J = ext.base.uniformizer_power(J)
    signed = sum(ext.chi_star(c + p_J * r) for r in range(ext.p ** k))
    acc.entries[v] += weight * signed / Fraction(q) ** (v + nd)


def _unit_character_average(ext: QuadExt) -> Fraction:
    """Mean of chi* over O_E^*: 1 when every unit is a norm, else 0."""
    return Fraction(1) if not ext.case.ramified else Fraction(0)


def integrate_quadratic(ext: QuadExt, f: QuadraticIntegrand, start: Sequence[Cell],
                        char: Character = "trivial", depth_cap: int | None = None,
                        closure: bool = True) -> ShellHistogram:
    """Shell histogram of chi(f) over the union of the start cells.

    The depth cap defaults to min(24, working precision).
    """
    if depth_cap is None:
        depth_cap = min(24, ext.precision)
    _check_depth(ext, depth_cap)
    q = ext.q
    ratio = Fraction(1, q)
    if char == "star":
        ratio = ratio * ext.chi_star(ext.pi)
    acc = _Accumulator(ratio)
    qF = ext.residue_size
    digits = ext.residue_digits
    nd = ext.norm_depth
    beta = f.beta
    beta_zero = beta.is_exact_zero()
    vbeta = beta.valuation()
    vbeta_F = 2 * vbeta if ext.case.ramified else vbeta
    count = 0

    stack = [(c.center, c.depth, c.measure) for c in reversed(start)]
    powers = {}
    while stack:
        w0, D, mu = stack.pop()
        count += 1
        Q0 = f(w0)
        lam0 = f.linear_part(w0)
        vlam = lam0.valuation()
        J = ext.trace_exponent(D + vlam)
        Jq = INF if beta_zero else vbeta + ext.quadratic_exponent(D)
        P = min(J, Jq)
        v0 = Q0.valuation()

        if not Q0.is_zero() and v0 < P:
            if char == "trivial":
                acc.entries[v0] += mu
                continue
            if P - v0 >= nd:
                acc.entries[v0] += mu * ext.chi_star(Q0)
                continue

        linear = (closure and not lam0.is_zero()
                  and (beta_zero or (vbeta_F + D > vlam and Jq >= J + 1)))
        if linear:
            if Q0.is_zero() and v0 < J:
                raise DepthExceedsPrecision("working precision too low to place the image ball")
            _ball_integral(ext, Q0, int(J), char, mu, acc)
            continue

        if D >= depth_cap or (P == INF and Q0.is_exact_zero()):
            # min(v0, P) bounds v(Q) on the cell; infinity means Q vanishes there
            bound = min(v0, P)
            if bound != INF:
                acc.unresolved[int(bound)] += mu
            continue
        if D not in powers:
            powers[D] = ext.uniformizer ** D
        step = powers[D]
        child = mu / qF
        for r in reversed(digits):
            stack.append((w0 + r * step, D + 1, child))

    return acc.histogram(signed=(char == "star"), depth=depth_cap, cells=count)


# -- norm fibres -----------------------------------------------------------

def norm_fiber_measure(ext: QuadExt, n: int) -> Fraction:
    """mu_F{x in O_F : v_E(N(x) - 1) = n}, by plain adaptive enumeration.

    A cell x0 + varpi^D O_F is decided once v(N(x0) - 1) is below the
    perturbation bound min(j(D + v(x0)), quadratic exponent of D), or once
    that bound already exceeds n.  No closed-form shortcut is used.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    limit = min(2 * (n + (ext.s or 0) + 2) + 2, ext.precision)
    qF = ext.residue_size
    total = Fraction(0)
    stack = [(ext.zero(), 0, Fraction(1))]
    while stack:
        x0, D, mu = stack.pop()
        value = x0.norm() - 1
        P = min(ext.trace_exponent(D + x0.valuation()), ext.quadratic_exponent(D))
        if not value.is_zero() and value.valuation() < P:
            if value.valuation() == n:
                total += mu
            continue
        if P > n:
            continue
        if D >= limit:
            raise DepthExceedsPrecision(f"norm fibre undecided at depth {D}")
        step = ext.uniformizer ** D
        for r in ext.residue_digits:
            stack.append((x0 + r * step, D + 1, mu / qF))
    return total


def norm_fiber_counts(ext: QuadExt, k: int) -> Counter:
    """Fibre sizes of N : (O_F / varpi^(2k))^* -> (O_E / p^k)^*."""
    counts: Counter = Counter()
    for x in ext.residue_system(2 * k):
        n = x.norm()
        if n.valuation() == 0:
            counts[n.residue(k)] += 1
    return counts


def measure_lemma_closed(case: int, q: int, s: int | None, n: int) -> Fraction:
    """Closed form of mu_F[N^-1(1 + pi^n O_E^*)] in the three cases."""
    from .errors import UnknownCase

    if n < 1:
        raise ValueError("n must be at least 1")
    q = Fraction(q)
    if case == 1:
        return (q * q - 1) / q ** (n + 2)
    if case == 2:
        return 2 * (q - 1) / q ** (n + 1)
    if case == 3:
        if s is None:
            raise ValueError("case 3 needs s")
        if n < s:
            return (q - 1) / q ** (n + 1)
        if n == s:
            return (q - 2) / q ** (s + 1)
        return 2 * (q - 1) / q ** (n + 1)
    raise UnknownCase(f"unknown case {case!r}")
