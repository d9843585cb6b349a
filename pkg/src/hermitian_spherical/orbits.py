"""2x2 Hermitian matrices over F, their lattice invariants, and K-orbits.

K = GL_2(O_F) acts by A -> k A k*.  The representatives are the RP/RU
tables (planes, hyperbolic planes H(0), H(1) and diagonals), optionally
scaled by a power of pi.  Classification matches invariants only; it never
searches for an explicit k.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterator

from .errors import AmbiguousClass, NoMatchingClass, SingularMatrix, WrongCase
from .extension import ExtElem, QuadExt
from .laurent import LaurentRational, qpow
from .padic import INF, BaseElem, Number


@dataclass(frozen=True, eq=False)
class HermitianMatrix2:
    """((a, c), (conj(c), b)) with a, b in E and c in F."""

    a: BaseElem
    b: BaseElem
    c: ExtElem

    @property
    def ext(self) -> QuadExt:
        return self.c.ext

    @classmethod
    def of(cls, ext: QuadExt, a: Number | BaseElem, b: Number | BaseElem,
           c: Number | BaseElem | ExtElem) -> "HermitianMatrix2":
        return cls(ext.base(a), ext.base(b), ext(c))

    @classmethod
    def parse(cls, ext: QuadExt, text: str) -> "HermitianMatrix2":
        """Read ``a;b;c_a,c_b`` where c = c_a + c_b sqrt(d)."""
        parts = [t.strip() for t in text.split(";")]
        if len(parts) != 3:
            raise ValueError("matrix must look like 'a;b;c_a,c_b'")
        ca, _, cb = parts[2].partition(",")
        parse = ext.base.parse
        return cls(parse(parts[0]), parse(parts[1]),
                   ExtElem(ext, parse(ca), parse(cb) if cb else ext.base(0)))

    def det(self) -> BaseElem:
        return self.a * self.b - self.c.norm()

    def rows(self) -> tuple[tuple[ExtElem, ExtElem], tuple[ExtElem, ExtElem]]:
        ext = self.ext
        return ((ext(self.a), self.c), (self.c.conjugate(), ext(self.b)))

    def scaled(self, e: Number | BaseElem) -> "HermitianMatrix2":
        e = self.ext.base(e)
        return HermitianMatrix2(self.a * e, self.b * e, self.c * e)

    def conjugate_by(self, k: tuple[tuple[ExtElem, ExtElem], tuple[ExtElem, ExtElem]]) -> "HermitianMatrix2":
        """k A k*."""
        A = self.rows()
        kA = [[k[i][0] * A[0][j] + k[i][1] * A[1][j] for j in range(2)] for i in range(2)]
        ks = [[k[j][i].conjugate() for j in range(2)] for i in range(2)]
        out = [[kA[i][0] * ks[0][j] + kA[i][1] * ks[1][j] for j in range(2)] for i in range(2)]
        return HermitianMatrix2(out[0][0].in_base(), out[1][1].in_base(), out[0][1])

    def value(self, r1: ExtElem, r2: ExtElem) -> BaseElem:
        """r A r* for the row vector r = (r1, r2)."""
        return self.a * r1.norm() + self.b * r2.norm() + (r1 * self.c * r2.conjugate()).trace()

    def apply(self, x1: ExtElem, x2: ExtElem) -> tuple[ExtElem, ExtElem]:
        """A x for the column vector x = (x1, x2)."""
        ext = self.ext
        return (ext(self.a) * x1 + self.c * x2, self.c.conjugate() * x1 + ext(self.b) * x2)

    def __str__(self) -> str:
        return f"[[{self.a}, {self.c}], [conj, {self.b}]]"


# -- invariants ---------------------------------------------------------------

@dataclass(frozen=True)
class OrbitInvariants:
    """Exponents are v_F except det_valuation, which is v_E(det)."""

    det_valuation: int
    det_class: int
    scalar_exponent: int
    norm_exponent: int
    modularity: int | None
    norm_class: int

    def describe(self) -> str:
        mod = "not modular" if self.modularity is None else f"varpi^{self.modularity}-modular"
        return (f"v_E(det)={self.det_valuation}, chi*(det)={self.det_class:+d}, "
                f"sL=varpi^{self.scalar_exponent}, nL=varpi^{self.norm_exponent}, {mod}, "
                f"norm class={self.norm_class:+d}")


def _vF_base(ext: QuadExt, e: BaseElem) -> int | float:
    v = e.valuation()
    return 2 * v if ext.case.ramified else v


def primitive_vectors(ext: QuadExt, depth: int) -> Iterator[tuple[ExtElem, ExtElem]]:
    """Primitive vectors mod varpi^depth, one per line through the origin.

    Scaling by a unit changes r A r* by a unit norm and A x by a unit, so
    lines (1, t) and (y, 1) with y in varpi O_F cover everything.
    """
    one = ext.one()
    for t in ext.residue_system(depth):
        yield one, t
    for y in ext.residue_system(depth, start=1):
        yield y, one


def _perturbation(ext: QuadExt, A: HermitianMatrix2, depth: int) -> int | float:
    """Lower bound for v_E of the change of r A r* when r moves by varpi^depth."""
    j = ext.trace_exponent
    return min(A.a.valuation() + j(depth), A.b.valuation() + j(depth),
               j(depth + A.c.valuation()))


def invariants(A: HermitianMatrix2) -> OrbitInvariants:
    ext = A.ext
    det = A.det()
    if det.is_zero():
        raise SingularMatrix("matrix is singular at working precision")
    scalar = min(_vF_base(ext, A.a), _vF_base(ext, A.b), A.c.valuation())
    depth = (ext.s or 0) + 3
    nd = ext.norm_depth
    while True:
        vectors = list(primitive_vectors(ext, depth))
        values = [A.value(r1, r2) for r1, r2 in vectors]
        n0 = min(v.valuation() for v in values)
        if _perturbation(ext, A, depth) >= n0 + nd:
            break
        depth += 1
    classes = {ext.chi_star(v) for v in values if not v.is_zero() and v.valuation() == n0}
    norm_class = classes.pop() if len(classes) == 1 else 0

    def level(x: tuple[ExtElem, ExtElem]) -> int | float:
        y1, y2 = A.apply(*x)
        return min(y1.valuation(), y2.valuation())

    levels = {level(x) for x in vectors}
    modularity = scalar if levels == {scalar} else None
    return OrbitInvariants(
        det_valuation=int(det.valuation()),
        det_class=ext.chi_star(det),
        scalar_exponent=int(scalar),
        norm_exponent=int(2 * n0 if ext.case.ramified else n0),
        modularity=modularity,
        norm_class=norm_class,
    )


# -- representatives ------------------------------------------------------------

class Tag(str, Enum):
    HYPERBOLIC0 = "Hyperbolic0"
    HYPERBOLIC1 = "Hyperbolic1"
    DELTA_PLANE = "DeltaPlane"
    PLANE4 = "Plane4"
    PLANE5 = "Plane5"
    PLANE6 = "Plane6"
    PLANE7 = "Plane7"
    DIAGONAL = "Diagonal"


PLANES = (Tag.PLANE4, Tag.PLANE5, Tag.PLANE6, Tag.PLANE7)


@dataclass(frozen=True)
class Representative:
    """A table entry, times pi^scale.

    For diagonals, eps1/eps2 are True when the entry carries Delta.
    Diagonals are always stored with scale 0 (scaling shifts lambda).
    """

    tag: Tag
    m: int | None = None
    lam1: int | None = None
    lam2: int | None = None
    eps1: bool = False
    eps2: bool = False
    scale: int = 0

    @classmethod
    def diagonal(cls, lam1: int, lam2: int, eps1: bool = False, eps2: bool = False) -> "Representative":
        return cls(Tag.DIAGONAL, lam1=lam1, lam2=lam2, eps1=eps1, eps2=eps2)

    @property
    def gap(self) -> int | None:
        return None if self.tag is not Tag.DIAGONAL else self.lam1 - self.lam2

    def base(self) -> "Representative":
        return replace(self, scale=0)

    def scaled(self, k: int) -> "Representative":
        if self.tag is Tag.DIAGONAL:
            return replace(self, lam1=self.lam1 + k, lam2=self.lam2 + k)
        return replace(self, scale=self.scale + k)

    def label(self) -> str:
        if self.tag is Tag.DIAGONAL:
            e1 = "Delta" if self.eps1 else "1"
            e2 = "Delta" if self.eps2 else "1"
            text = f"Diagonal({self.lam1},{self.lam2},{e1},{e2})"
        elif self.tag in PLANES:
            text = f"{self.tag.value}({self.m})"
        else:
            text = self.tag.value
        return text if not self.scale else f"pi^{self.scale}*{text}"

    __str__ = label

    @classmethod
    def parse(cls, text: str) -> "Representative":
        """Inverse of :meth:`label`, e.g. ``pi^2*Plane6(1)`` or ``Diagonal(3,0,Delta,1)``."""
        t = text.replace(" ", "")
        scale = 0
        m = re.fullmatch(r"pi(?:\^(\d+))?\*(.+)", t)
        if m:
            scale = int(m.group(1) or 1)
            t = m.group(2)
        m = re.fullmatch(r"Diagonal\((\d+),(\d+),(1|Delta),(1|Delta)\)", t)
        if m:
            if scale:
                raise ValueError("write scaled diagonals with shifted exponents")
            return cls.diagonal(int(m.group(1)), int(m.group(2)),
                                m.group(3) == "Delta", m.group(4) == "Delta")
        m = re.fullmatch(r"(Plane[4-7])\((\d+)\)", t)
        if m:
            return cls(Tag(m.group(1)), int(m.group(2)), scale=scale)
        try:
            tag = Tag(t)
        except ValueError:
            raise ValueError(f"unknown representative {text!r}") from None
        if tag in PLANES or tag is Tag.DIAGONAL:
            raise ValueError(f"{tag.value} needs parameters")
        return cls(tag, scale=scale)

    def validate(self, ext: QuadExt) -> None:
        _require_wild(ext)
        s = ext.s
        if self.tag in PLANES:
            m = self.m
            if self.tag in (Tag.PLANE4, Tag.PLANE5):
                ok = 0 < 2 * m < (s if ext.case.value == "RP" else s - 1)
            else:
                ok = 0 < 2 * m < (s + 2 if ext.case.value == "RP" else s + 1)
            if not ok:
                raise ValueError(f"{self.label()} is outside the parameter range for s={s}")
        if self.tag is Tag.DIAGONAL:
            if self.lam1 < self.lam2:
                raise ValueError("diagonal needs lam1 >= lam2")
            if self.eps1 and self.gap <= s:
                raise ValueError("diagonal with lam1 - lam2 <= s needs eps1 = 1")

    def matrix(self, ext: QuadExt) -> HermitianMatrix2:
        pi, w, s = ext.pi, ext.uniformizer, ext.s
        E = ext.base
        rho = E(ext.rho) if ext.rho is not None else None
        zero = E(0)
        t = self.tag
        if t is Tag.HYPERBOLIC0:
            A = HermitianMatrix2(zero, zero, ext.one())
        elif t is Tag.HYPERBOLIC1:
            A = HermitianMatrix2(zero, zero, w)
        elif t is Tag.DELTA_PLANE:
            if ext.case.value == "RP":
                h = s // 2
                A = HermitianMatrix2(pi ** h, -(pi ** h) * rho, ext.one())
            else:
                h = (s + 1) // 2
                A = HermitianMatrix2(pi ** h, -(pi ** h) * rho, w)
        elif t is Tag.PLANE4:
            A = HermitianMatrix2(pi ** self.m, zero, ext.one())
        elif t is Tag.PLANE5:
            A = HermitianMatrix2(pi ** self.m, -(pi ** (s - self.m)) * rho, ext.one())
        elif t is Tag.PLANE6:
            A = HermitianMatrix2(pi ** self.m, zero, w)
        elif t is Tag.PLANE7:
            A = HermitianMatrix2(pi ** self.m, -(pi ** (s + 1 - self.m)) * rho, w)
        else:
            delta = ext.delta
            a = pi ** self.lam1 * (delta if self.eps1 else 1)
            b = pi ** self.lam2 * (delta if self.eps2 else 1)
            A = HermitianMatrix2(a, b, ext.zero())
        return A.scaled(pi ** self.scale) if self.scale else A

    def base_det_valuation(self, ext: QuadExt) -> int:
        if self.tag is Tag.DIAGONAL:
            return self.lam1 + self.lam2
        odd = self.tag in (Tag.HYPERBOLIC1, Tag.PLANE6, Tag.PLANE7) or (
            self.tag is Tag.DELTA_PLANE and ext.case.value == "RU")
        return int(odd)

    def expected_modularity(self, ext: QuadExt) -> int | None:
        """The section of the table the entry comes from, as a v_F level."""
        if self.tag is Tag.DIAGONAL:
            return 2 * self.lam1 if self.lam1 == self.lam2 else None
        return self.base_det_valuation(ext) + 2 * self.scale


def _require_wild(ext: QuadExt) -> None:
    if not ext.case.wild:
        raise WrongCase("representative tables are given for wildly ramified (RP/RU) extensions")


def unscaled_entries(ext: QuadExt) -> list[Representative]:
    """Every non-diagonal table entry at scale 0."""
    _require_wild(ext)
    s = ext.s
    rp = ext.case.value == "RP"
    out = [Representative(Tag.HYPERBOLIC0), Representative(Tag.HYPERBOLIC1),
           Representative(Tag.DELTA_PLANE)]
    lim45 = s if rp else s - 1
    lim67 = s + 2 if rp else s + 1
    for m in range(1, s + 2):
        if 2 * m < lim45:
            out += [Representative(Tag.PLANE4, m), Representative(Tag.PLANE5, m)]
    for m in range(1, s + 2):
        if 2 * m < lim67:
            out += [Representative(Tag.PLANE6, m), Representative(Tag.PLANE7, m)]
    return out


def diagonals_with_det(ext: QuadExt, det_valuation: int, lam2: int | None = None) -> list[Representative]:
    s = ext.s
    out = []
    for l2 in range(0, det_valuation // 2 + 1):
        if lam2 is not None and l2 != lam2:
            continue
        l1 = det_valuation - l2
        for e1 in (False, True):
            if e1 and l1 - l2 <= s:
                continue
            for e2 in (False, True):
                out.append(Representative.diagonal(l1, l2, e1, e2))
    return out


def representative_table(ext: QuadExt, det_valuation_bound: int) -> list[Representative]:
    """All integral representatives with 0 <= v_E(det) <= bound."""
    out = []
    for D in range(det_valuation_bound + 1):
        for rep in unscaled_entries(ext):
            extra = D - rep.base_det_valuation(ext)
            if extra >= 0 and extra % 2 == 0:
                out.append(replace(rep, scale=extra // 2))
        out += diagonals_with_det(ext, D)
    return out


def table_modular(ext: QuadExt, level: int) -> list[Representative]:
    """Unscaled non-diagonal entries listed in the varpi^level-modular part."""
    return [r for r in unscaled_entries(ext)
            if r.tag in (Tag.HYPERBOLIC0, Tag.HYPERBOLIC1, Tag.DELTA_PLANE)
            and r.base_det_valuation(ext) == level] + [
        r for r in unscaled_entries(ext) if r.tag in PLANES and
        (r.tag in (Tag.PLANE6, Tag.PLANE7)) == (level == 1)]


@lru_cache(maxsize=None)
def _reference_invariants(ext: QuadExt, rep: Representative) -> OrbitInvariants:
    return invariants(rep.matrix(ext))


def _candidates(ext: QuadExt, det_valuation: int, scalar_exponent: int) -> list[Representative]:
    """Unscaled entries (sL in {O_F, varpi O_F}) at the given det valuation."""
    out = [r for r in unscaled_entries(ext) if r.base_det_valuation(ext) == det_valuation]
    if scalar_exponent == 0:
        out += diagonals_with_det(ext, det_valuation, lam2=0)
    return out


def classify(A: HermitianMatrix2) -> Representative:
    ext = A.ext
    _require_wild(ext)
    if A.det().is_zero():
        raise SingularMatrix("matrix is singular at working precision")
    scalar = min(_vF_base(ext, A.a), _vF_base(ext, A.b), A.c.valuation())
    k = int(scalar) // 2
    reduced = A.scaled(ext.pi ** (-k)) if k else A
    inv = invariants(reduced)
    matches = [r for r in _candidates(ext, inv.det_valuation, inv.scalar_exponent)
               if _reference_invariants(ext, r) == inv]
    if not matches:
        raise NoMatchingClass(f"no table entry has invariants {inv.describe()}")
    if len(matches) > 1:
        raise AmbiguousClass("invariants match " + ", ".join(r.label() for r in matches))
    return matches[0].scaled(k)


def boundary_note(ext: QuadExt, rep: Representative) -> str | None:
    """Diagonals at lam1 - lam2 = s, where the table only lists eps1 = 1."""
    if rep.tag is Tag.DIAGONAL and rep.gap == ext.s:
        return (f"note: lam1 - lam2 = s = {ext.s}; diag(pi^{rep.lam1} Delta, pi^{rep.lam2}) "
                "shares these invariants and is reported as the eps1 = 1 entry")
    return None


def scale_action(ext: QuadExt, rep: Representative, a: BaseElem | Number,
                 chi1: str = "trivial") -> tuple[Representative, LaurentRational]:
    """Class of a * rep and the factor |a|^(s1 + 2 s2) chi1(a) chi2(a)^2."""
    a = ext.base(a)
    if a.is_zero():
        raise ValueError("scaling by zero")
    new = classify(rep.matrix(ext).scaled(a))
    v = int(a.valuation())
    sign = ext.chi_star(a) if chi1 == "star" else 1
    # |a|^(s1+2s2) = q^(-2 v (s1 + 2 s2)) and s1 + 2 s2 = -z1 - z2
    return new, qpow(ext.q, 0, 2 * v, 2 * v, coeff=sign)


def random_k(ext: QuadExt, rng, depth: int = 6) -> tuple[tuple[ExtElem, ExtElem], tuple[ExtElem, ExtElem]]:
    """A random element of GL_2(O_F) with entries drawn modulo varpi^depth."""
    reps = list(ext.residue_system(depth))
    while True:
        k = [[reps[rng.randrange(len(reps))] for _ in range(2)] for _ in range(2)]
        det = k[0][0] * k[1][1] - k[0][1] * k[1][0]
        if det.valuation() == 0:
            return ((k[0][0], k[0][1]), (k[1][0], k[1][1]))
