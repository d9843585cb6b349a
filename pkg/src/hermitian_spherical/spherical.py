"""Spherical functions L(x, chi1, chi2, z) on the wildly ramified dyadic tables.

Two independent routes:

* :func:`closed_form` writes the rational function of each table entry;
* :func:`oracle_eval` integrates the K-average directly through the Iwahori
  decomposition, i.e. as the sum of two quadratic-integrand integrals over
  O_F and varpi O_F, each turned into a shell histogram by
  :func:`integrate_quadratic`.

Throughout s1 = -z1 + z2 - 1/2, s2 = -z2 + 1/4 and |y| = q^(-2 v_E(y)), so
one step of E-valuation in |y|^s1 is the monomial q^(-2 s1).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cells import Cell, QuadraticIntegrand, ShellHistogram, integrate_quadratic
from .cells import measure_lemma_closed, norm_fiber_measure
from .errors import (
    DepthExceedsPrecision,
    PoleAtPoint,
    RepNotInTable,
    SingularMatrix,
    WrongCase,
)
from .extension import QuadExt, make_quadratic_extension
from .laurent import LaurentRational, equals, eval_at, qpow, sigma_sum, sigma_swap
from .orbits import (
    HermitianMatrix2,
    Representative,
    Tag,
    classify,
    representative_table,
    scale_action,
)
from .padic import BaseElem, BaseField, Number

CHARS = ("trivial", "star")


@dataclass(frozen=True)
class CharacterPair:
    chi1: str = "trivial"
    chi2: str = "trivial"

    def __post_init__(self) -> None:
        for c in (self.chi1, self.chi2):
            if c not in CHARS:
                raise ValueError(f"character must be one of {CHARS}, got {c!r}")

    @classmethod
    def parse(cls, chi1: str, chi2: str) -> "CharacterPair":
        norm = {"1": "trivial", "trivial": "trivial", "star": "star", "*": "star"}
        return cls(norm[chi1], norm[chi2])

    def value(self, ext: QuadExt, which: int, e: BaseElem | Number) -> int:
        """chi_which(e), with chi(0) = 0."""
        e = ext.base(e)
        if e.is_zero():
            return 0
        kind = self.chi1 if which == 1 else self.chi2
        return 1 if kind == "trivial" else ext.chi_star(e)

    def twisted(self) -> "CharacterPair":
        """(chi1, chi* chi2)."""
        return CharacterPair(self.chi1, "star" if self.chi2 == "trivial" else "trivial")

    def label(self) -> str:
        name = {"trivial": "1", "star": "chi*"}
        return f"({name[self.chi1]}, {name[self.chi2]})"


# -- closed forms ---------------------------------------------------------------

def _P(q: int, a1: int, a2: int, const: Fraction | int = 0) -> LaurentRational:
    """q^(const + 2 a1 z1 + 2 a2 z2)."""
    return qpow(q, const, 2 * a1, 2 * a2)


def _hyperbolic_den(q: int) -> LaurentRational:
    """q^(2 z2) - q^(2 z1)."""
    return _P(q, 0, 1) - _P(q, 1, 0)


def diagonal_star_form(ext: QuadExt, rep: Representative, chars: CharacterPair) -> LaurentRational:
    """L(diag, chi*, chi2) for lam1 - lam2 > s."""
    q, s = ext.q, ext.s
    l1, l2 = rep.lam1, rep.lam2
    e1 = ext.delta if rep.eps1 else ext.base(1)
    e2 = ext.delta if rep.eps2 else ext.base(1)
    sign = ext.chi_star(e2) * chars.value(ext, 2, e1 * e2)
    inner = _P(q, l1 - s, l2) / (_P(q, 1, 0) - _P(q, 0, 1))
    return (qpow(q, Fraction(l2 - l1, 2), coeff=sign) / (1 + Fraction(1, q))
            * qpow(q, 0, 0, 2 * s) * (_P(q, 0, 1) - _P(q, 1, 0, -1)) * sigma_sum(inner))


def diagonal_trivial_form(ext: QuadExt, rep: Representative, chars: CharacterPair) -> LaurentRational:
    q, s = ext.q, ext.s
    l1, l2 = rep.lam1, rep.lam2
    e1 = ext.delta if rep.eps1 else ext.base(1)
    e2 = ext.delta if rep.eps2 else ext.base(1)
    head = qpow(q, Fraction(l2 - l1, 2), 0, -2 * s, coeff=chars.value(ext, 2, e1 * e2))
    head = head / ((1 + Fraction(1, q)) * _hyperbolic_den(q))
    body = (ext.chi_star(-(e1 * e2)) * _P(q, l1 + s, l2) * (_P(q, 1, 0) - _P(q, 0, 1, -1))
            + _P(q, l2, l1 + s) * (_P(q, 0, 1) - _P(q, 1, 0, -1)))
    return head * body


def _forms_trivial(ext: QuadExt, rep: Representative, chars: CharacterPair) -> LaurentRational:
    """chi1 = 1, unscaled non-diagonal entries, as stated item by item."""
    q, s, l = ext.q, ext.s, ext.l
    rp = ext.case.value == "RP"
    c_m1 = chars.value(ext, 2, -1)
    c_md = chars.value(ext, 2, -ext.delta)
    one_minus = 1 - Fraction(1, q)
    one_plus = 1 + Fraction(1, q)
    lead = qpow(q, 0, 0, -2 * s)  # q^(-2 s z2)
    den = _hyperbolic_den(q)
    t = rep.tag
    m = rep.m
    if t is Tag.HYPERBOLIC0:
        if rp:
            return (c_m1 * one_minus / one_plus * qpow(q, l) * lead
                    * _sym(q, s) * (_P(q, 1, 0) + _P(q, 0, 1)) / den)
        return q * c_m1 * one_minus * lead * _sym(q, s + 1) / den
    if t is Tag.HYPERBOLIC1:
        if rp:
            return (c_m1 * one_minus * qpow(q, Fraction(2 * l + 1, 2)) * lead
                    * _sym(q, s) * _P(q, 1, 1) / den)
        return (c_m1 * one_minus * qpow(q, Fraction(2 * l + 1, 2)) * lead / one_plus
                * _sym(q, s + 1) * (_P(q, 1, 0) + _P(q, 0, 1)) / den)
    if t is Tag.DELTA_PLANE:
        if rp:
            return c_md * qpow(q, l) * lead * _sym(q, s)
        return c_md * qpow(q, Fraction(s, 2)) * lead * _sym(q, s + 1)
    if t is Tag.PLANE4:
        return (c_m1 / one_plus * qpow(q, m) * lead * one_minus / den
                * sigma_sum(_P(q, m, s - m + 1)))
    if t is Tag.PLANE6:
        return (c_m1 * qpow(q, Fraction(-1, 2)) / one_plus * qpow(q, m) * lead / den
                * sigma_sum(_P(q, m, 2 + s - m) - _P(q, s + 1 - m, m + 1, -1)))
    if t is Tag.PLANE5:
        return (c_md * qpow(q, m) * lead / one_plus
                * sigma_sum(_P(q, m, 1 - m + s) / den))
    if t is Tag.PLANE7:
        return (c_md * qpow(q, Fraction(2 * m - 1, 2)) * lead / one_plus
                * sigma_sum(_P(q, m, 2 + s - m) / den))
    raise RepNotInTable(f"no closed form for {rep.label()}")


def _sym(q: int, k: int) -> LaurentRational:
    """q^(k (z1 + z2))."""
    return qpow(q, 0, k, k)


def statement_form(ext: QuadExt, rep: Representative, chars: CharacterPair) -> LaurentRational:
    """The closed form exactly as the theorem states it (scale 0)."""
    if rep.tag is Tag.DIAGONAL:
        if chars.chi1 == "star":
            if rep.gap > ext.s:
                return diagonal_star_form(ext, rep, chars)
            return LaurentRational.zero(ext.q)
        return diagonal_trivial_form(ext, rep, chars)
    if chars.chi1 == "star":
        return LaurentRational.zero(ext.q)
    return _forms_trivial(ext, rep, chars)


# -- oracle ---------------------------------------------------------------------

def shell_step(q: int) -> LaurentRational:
    """q^(-2 s1) = q^(2 z1 - 2 z2 + 1)."""
    return qpow(q, 1, 2, -2)


@dataclass
class SphericalValue:
    """An exact closed form, or an oracle value with its remainder.

    For oracle values, ``assembled`` is the integral over the resolved
    cells; the unresolved cells have total Haar measure ``tail_bound``
    (already multiplied by q/(q+1)).  At a point with Re(s1) >= 0 their
    contribution is at most tail_bound * |prefactor part| in absolute value.
    """

    exact: LaurentRational | None = None
    assembled: LaurentRational | None = None
    tail_bound: Fraction = Fraction(0)
    prefactor: LaurentRational | None = None
    histograms: tuple[ShellHistogram, ...] = ()
    q: int = 0

    @property
    def function(self) -> LaurentRational:
        return self.exact if self.exact is not None else self.assembled

    @property
    def is_exact(self) -> bool:
        return self.exact is not None or self.tail_bound == 0

    def evaluate(self, z1: complex, z2: complex) -> complex:
        return eval_at(self.function, self.q, z1, z2)

    def bound_at(self, z1: complex, z2: complex) -> float:
        """Bound on |true value - evaluate(z)| at a point with Re(s1) >= 0."""
        if self.tail_bound == 0:
            return 0.0
        xabs = abs(eval_at(shell_step(self.q), self.q, z1, z2))
        scale = abs(eval_at(self.prefactor, self.q, z1, z2)) if self.prefactor is not None else 1.0
        total = sum(h.bound(xabs) for h in self.histograms)
        return scale * total


def with_precision(ext: QuadExt, precision: int) -> QuadExt:
    """The same extension rebuilt at another working precision."""
    return make_quadratic_extension(BaseField(ext.p, precision), ext.d.lift())


def default_depth(ext: QuadExt, rep: Representative | None) -> int:
    if not ext.case.wild:
        raise WrongCase("the spherical engine covers wildly ramified extensions")
    s = ext.s
    if rep is not None and rep.tag is Tag.DIAGONAL:
        return 2 * rep.gap + 2 * s + 6
    return 2 * s + 6


def lemma_prefactor(ext: QuadExt, A: HermitianMatrix2, chars: CharacterPair) -> LaurentRational:
    """q chi2(det) |det|^s2 / (q + 1), with |det|^s2 = q^(2 v z2 - v/2)."""
    det = A.det()
    v = int(det.valuation())
    q = ext.q
    return qpow(q, Fraction(-v, 2), 0, 2 * v, coeff=chars.value(ext, 2, det)) * Fraction(q, q + 1)


def oracle_eval(ext: QuadExt, A: HermitianMatrix2, chars: CharacterPair,
                depth: int | None = None, closure: bool = True) -> SphericalValue:
    """Integrate the K-average of the twisted minors by shell histograms.

    ``closure=False`` turns off the linear-pushforward rule, leaving plain
    cell subdivision; cells around zeros of the integrand then stay open
    and are reported through ``tail_bound``.
    """
    if not ext.case.wild:
        raise WrongCase("the spherical engine covers wildly ramified extensions")
    if A.det().is_zero():
        raise SingularMatrix("matrix is singular at working precision")
    if depth is None:
        depth = 2 * ext.s + 6
    if depth > ext.precision:
        raise DepthExceedsPrecision(f"depth {depth} exceeds precision {ext.precision}")
    q = ext.q
    cbar = A.c.conjugate()
    outer = integrate_quadratic(ext, QuadraticIntegrand(A.a, cbar, A.b),
                                [Cell(ext.zero(), 0, Fraction(1))], chars.chi1, depth, closure)
    inner = integrate_quadratic(ext, QuadraticIntegrand(A.b, cbar, A.a),
                                [Cell(ext.zero(), 1, Fraction(1, q))], chars.chi1, depth, closure)
    x = shell_step(q)
    pref = lemma_prefactor(ext, A, chars)
    assembled = pref * (outer.assemble(x) + inner.assemble(x))
    tail = Fraction(q, q + 1) * (outer.residual + inner.residual)
    return SphericalValue(assembled=assembled, tail_bound=tail, prefactor=pref,
                          histograms=(outer, inner), q=q)


# -- engine closed forms ----------------------------------------------------------

def plane6_derived_form(ext: QuadExt, m: int, chars: CharacterPair) -> LaurentRational:
    """Plane6 with the second exponent pair in the order the derivation ends on."""
    q, s = ext.q, ext.s
    return (chars.value(ext, 2, -1) * qpow(q, Fraction(2 * m - 1, 2), 0, -2 * s)
            / (1 + Fraction(1, q)) / _hyperbolic_den(q)
            * sigma_sum(_P(q, m, 2 + s - m) - _P(q, m + 1, s + 1 - m, -1)))


def hyperbolic0_derived_form(ext: QuadExt, chars: CharacterPair) -> LaurentRational:
    """RP Hyperbolic0 written with q^(l - 4 l z2) in place of q^(l - 2 s z2)."""
    q, s, l = ext.q, ext.s, ext.l
    return (chars.value(ext, 2, -1) * (1 - Fraction(1, q)) / (1 + Fraction(1, q))
            * qpow(q, l, 0, -4 * l) * _sym(q, s) * (_P(q, 1, 0) + _P(q, 0, 1)) / _hyperbolic_den(q))


def _mutated(f: LaurentRational) -> LaurentRational:
    """Test hook: perturb one coefficient by adding the constant 1."""
    return f + LaurentRational.one(f.q)


def closed_form(ext: QuadExt, rep: Representative, chars: CharacterPair,
                mutate: bool = False) -> LaurentRational:
    """L(rep, chi1, chi2, z) as an exact rational function."""
    if not ext.case.wild:
        raise WrongCase("closed forms are given for wildly ramified extensions")
    try:
        rep.validate(ext)
    except ValueError as exc:
        raise RepNotInTable(str(exc)) from None
    base = rep.base()
    if base.tag is Tag.PLANE6 and chars.chi1 == "trivial":
        f = plane6_derived_form(ext, base.m, chars)
    else:
        f = statement_form(ext, base, chars)
    if rep.scale:
        # scaling by pi^a: chi1(pi) chi2(pi)^2 |pi^a|^(s1 + 2 s2)
        _, pref = _pi_prefactor(ext, rep.scale, chars)
        f = pref * f
    return _mutated(f) if mutate else f


def _pi_prefactor(ext: QuadExt, k: int, chars: CharacterPair) -> tuple[int, LaurentRational]:
    sign = chars.value(ext, 1, ext.pi) ** k
    return sign, qpow(ext.q, 0, 2 * k, 2 * k, coeff=sign)


def closed_value(ext: QuadExt, rep: Representative, chars: CharacterPair) -> SphericalValue:
    return SphericalValue(exact=closed_form(ext, rep, chars), q=ext.q)


def tilde(ext: QuadExt, f: LaurentRational) -> LaurentRational:
    """q^(2 s z2) * f."""
    return qpow(ext.q, 0, 0, 2 * ext.s) * f


def functional_equation_check(ext: QuadExt, rep: Representative, mutate: bool = False) -> bool:
    """Both z1 <-> z2 relations, for chi2 trivial and chi2 = chi*."""
    q, s = ext.q, ext.s
    c = ext.chi_star(-1)
    factor = (qpow(q, 0, 4 * s, -4 * s) * (_P(q, 1, 0) - _P(q, 0, 1, -1))
              / (_P(q, 0, 1) - _P(q, 1, 0, -1)))
    for chi2 in CHARS:
        triv = CharacterPair("trivial", chi2)
        star = CharacterPair("star", chi2)
        lhs = sigma_swap(tilde(ext, closed_form(ext, rep, triv, mutate)))
        rhs = -c * tilde(ext, closed_form(ext, rep, triv.twisted()))
        if not equals(lhs, rhs):
            return False
        f = tilde(ext, closed_form(ext, rep, star, mutate))
        if not equals(sigma_swap(f), factor * f):
            return False
    return True


def scaling_check(ext: QuadExt, rep: Representative, a: BaseElem | Number,
                  chars: CharacterPair, depth: int | None = None) -> tuple[bool, bool]:
    """(closed form of the class of a*x vs prefactor * closed form of x,
    oracle on the matrix a*x vs the same right side)."""
    new, pref = scale_action(ext, rep, a, chars.chi1)
    # chi2(a)^2 = 1 for quadratic characters
    rhs = pref * closed_form(ext, rep, chars)
    closed_ok = equals(closed_form(ext, new, chars), rhs)
    A = rep.matrix(ext).scaled(ext.base(a))
    o = oracle_eval(ext, A, chars, depth if depth is not None else default_depth(ext, new))
    oracle_ok = o.tail_bound == 0 and equals(o.assembled, rhs)
    return closed_ok, oracle_ok


# -- sampling -----------------------------------------------------------------------

def sample_points(q: int, count: int, seed: int, avoid: tuple[LaurentRational, ...] = ()
                  ) -> list[tuple[complex, complex]]:
    """Seeded z = (z1, z2) with Re(s1) in (0, 2), away from poles of ``avoid``."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        z2 = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        s1 = complex(rng.uniform(0.05, 1.95), rng.uniform(-2, 2))
        z1 = z2 - 0.5 - s1
        try:
            if abs(eval_at(_hyperbolic_den(q), q, z1, z2)) < 1e-6:
                continue
            for f in avoid:
                eval_at(f, q, z1, z2)
        except PoleAtPoint:
            continue
        out.append((z1, z2))
    return out


# -- verification report ----------------------------------------------------------

@dataclass
class ReportRow:
    rep: str
    chi1: str
    mode: str
    status: str
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def line(self) -> str:
        return f"{self.rep} | {self.chi1} | {self.mode} | {self.status} | {self.detail}"


@dataclass
class Report:
    field_summary: str
    rows: list[ReportRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows)

    def add(self, rep: str, chi1: str, mode: str, ok: bool, detail: str = "") -> None:
        self.rows.append(ReportRow(rep, chi1, mode, "pass" if ok else "FAIL", detail))

    def lines(self) -> list[str]:
        failed = sum(not r.passed for r in self.rows)
        return ([f"# {self.field_summary}", "rep | chi1 | mode | status | detail"]
                + [r.line() for r in self.rows]
                + [f"# {len(self.rows) - failed} passed, {failed} failed"])

    def records(self) -> list[dict]:
        return [dict(rep=r.rep, chi1=r.chi1, mode=r.mode, status=r.status, detail=r.detail)
                for r in self.rows]


def _chi_name(c: str) -> str:
    return "1" if c == "trivial" else "chi*"


def compare(ext: QuadExt, rep: Representative, chars: CharacterPair, depth: int | None,
            samples: int, seed: int, mutate: bool = False,
            closure: bool = True) -> tuple[str, bool, str]:
    """Closed form against oracle: (mode, ok, detail)."""
    closed = closed_form(ext, rep, chars, mutate)
    o = oracle_eval(ext, rep.matrix(ext), chars,
                    depth if depth is not None else default_depth(ext, rep), closure)
    if o.tail_bound == 0:
        return "exact", equals(closed, o.assembled), "tail_bound=0"
    worst, worst_bound = 0.0, 0.0
    ok = True
    for z1, z2 in sample_points(ext.q, samples, seed, (closed, o.assembled)):
        err = abs(eval_at(closed, ext.q, z1, z2) - o.evaluate(z1, z2))
        bound = o.bound_at(z1, z2)
        worst, worst_bound = max(worst, err), max(worst_bound, bound)
        ok = ok and err <= bound < 1e-6
    return "numeric", ok, f"max err={worst:.3g}, max tail bound={worst_bound:.3g}"


def verify_all(ext: QuadExt, depth: int | None = None, z_samples: int = 20, seed: int = 0,
               det_bound: int = 5, mutate: bool = False) -> Report:
    """Oracle, functional equations, scaling and lemma rows for one extension."""
    if not ext.case.wild:
        raise WrongCase("verification covers wildly ramified extensions")
    from .norm_integrals import (
        character_integral,
        integral_lemma_closed,
        norm_integral_assembled,
    )

    table = representative_table(ext, det_bound)
    need = max(depth if depth is not None else default_depth(ext, r) for r in table)
    if need > ext.precision:
        ext = with_precision(ext, need)
        table = representative_table(ext, det_bound)
    report = Report(ext.summary())
    first = True
    for rep in table:
        for chi1 in CHARS:
            oks, details, mode = [], [], "exact"
            for chi2 in CHARS:
                m, ok, detail = compare(ext, rep, CharacterPair(chi1, chi2), depth, z_samples,
                                        seed, mutate=mutate and first)
                first = False
                oks.append(ok)
                details.append(f"chi2={_chi_name(chi2)}: {detail}")
                if m == "numeric":
                    mode = "numeric"
            report.add(rep.label(), _chi_name(chi1), mode, all(oks), "; ".join(details))
        report.add(rep.label(), "both", "functional-eq",
                   functional_equation_check(ext, rep, mutate=mutate and rep is table[0]))

    # scaling by pi, pi^2 and Delta on three entries
    picks = [r for r in table if r.scale == 0][:2] + [
        next(r for r in table if r.tag is Tag.DIAGONAL and r.gap > ext.s)]
    for rep in picks:
        for name, a in (("pi", ext.pi), ("pi^2", ext.pi ** 2), ("Delta", ext.delta)):
            for chi1 in CHARS:
                closed_ok, oracle_ok = scaling_check(ext, rep, a, CharacterPair(chi1, "trivial"))
                report.add(rep.label(), _chi_name(chi1), "scaling",
                           closed_ok and oracle_ok, f"a={name}")

    # consistency between equivalent displays of the same entry
    for chi2 in CHARS:
        chars = CharacterPair("trivial", chi2)
        for rep in table:
            if rep.tag is Tag.PLANE6 and rep.scale == 0:
                a = plane6_derived_form(ext, rep.m, chars)
                report.add(rep.label(), "1", "display", equals(a, statement_form(ext, rep, chars)),
                           f"chi2={_chi_name(chi2)}: statement vs derivation order")
                report.add(rep.label(), "1", "antisymmetry",
                           equals(sigma_swap(tilde(ext, a)), -tilde(ext, a)),
                           f"chi2={_chi_name(chi2)}")
        if ext.case.value == "RP":
            h0 = Representative(Tag.HYPERBOLIC0)
            report.add(h0.label(), "1", "display",
                       equals(hyperbolic0_derived_form(ext, chars), statement_form(ext, h0, chars)),
                       f"chi2={_chi_name(chi2)}: q^(l-2sz2) vs q^(l-4lz2)")

    # the lemma suite
    s, q = ext.s, ext.q
    for n in range(1, s + 4):
        ok = norm_fiber_measure(ext, n) == measure_lemma_closed(3, q, s, n)
        report.add("measure lemma", "-", "exact", ok, f"n={n}")
    thetas = [ext.base(u) for u in range(1, ext.p ** (s + 1)) if u % ext.p]
    for domain, ms in (("O_F", range(1, s + 1)), ("units", range(1, s))):
        for m in ms:
            ok = all(character_integral(ext, th, m, domain) == 0 for th in thetas)
            report.add("character lemma", "chi*", "exact", ok, f"{domain}, m={m}")
    for eta in (ext.base(1), ext.delta):
        sign = ext.chi_star(-eta)
        ok = equals(norm_integral_assembled(ext, eta), integral_lemma_closed(ext, sign))
        report.add("integral lemma", "1", "exact", ok, f"chi*(-eta)={sign:+d}")
    return report
