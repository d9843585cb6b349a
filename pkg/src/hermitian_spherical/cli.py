"""Command-line front end.

Field elements are written ``pi^v*u`` (meaning p^v * u), ``pi^v``, ``u``
or with a leading minus.  A Hermitian matrix ((a, c), (conj c, b)) is
written ``a;b;c_a,c_b`` with c = c_a + c_b sqrt(d).  A point z is written
``re,im;re,im`` for (z1, z2).

Exit status: 0 success, 1 usage error, 2 math-domain error, 3 a
verification row failed.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from typing import Sequence

from .errors import HermSphError, MathDomainError
from .extension import QuadExt, quadratic_extension
from .laurent import eval_at
from .orbits import HermitianMatrix2, Representative, boundary_note, classify, invariants

EXIT_OK, EXIT_USAGE, EXIT_MATH, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _field_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-p", type=int, required=True, help="residue characteristic of E = Q_p")
    p.add_argument("-d", type=int, required=True, help="F = E(sqrt(d))")
    p.add_argument("--precision", type=int, default=None,
                   help="p-adic digits carried (default: enough for the requested depth)")
    p.add_argument("--format", choices=("text", "records"), default="text")


def _make_ext(args: argparse.Namespace, depth: int | None = None) -> QuadExt:
    precision = args.precision
    ext = quadratic_extension(args.p, args.d, precision)
    if precision is None and depth is not None and depth > ext.precision:
        ext = quadratic_extension(args.p, args.d, depth)
    return ext


def _parse_z(text: str) -> tuple[complex, complex]:
    try:
        parts = [tuple(float(x) for x in pt.split(",")) for pt in text.split(";")]
        (a, b), (c, d) = parts
    except ValueError:
        raise UsageError(f"--z expects 're,im;re,im', got {text!r}") from None
    return complex(a, b), complex(c, d)


def _emit(args: argparse.Namespace, text_lines: list[str], record: object) -> None:
    if args.format == "records":
        print(json.dumps(record, sort_keys=True, default=str))
    else:
        print("\n".join(text_lines))


# -- subcommands ---------------------------------------------------------------

def cmd_field(args: argparse.Namespace) -> int:
    ext = _make_ext(args)
    _emit(args, ext.describe(), {
        "case": ext.case.value, "s": ext.s, "l": ext.l, "q": ext.q,
        "rho": ext.rho, "uniformizer": str(ext.uniformizer), "precision": ext.precision,
    })
    return EXIT_OK


def _read_matrix(ext: QuadExt, text: str) -> HermitianMatrix2:
    try:
        return HermitianMatrix2.parse(ext, text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_classify(args: argparse.Namespace) -> int:
    ext = _make_ext(args)
    A = _read_matrix(ext, args.matrix)
    rep = classify(A)
    inv = invariants(A)
    lines = [rep.label(), inv.describe()]
    note = boundary_note(ext, rep)
    if note:
        lines.append(note)
    _emit(args, lines, {"representative": rep.label(), "invariants": inv.__dict__, "note": note})
    return EXIT_OK


def cmd_spherical(args: argparse.Namespace) -> int:
    from .spherical import CharacterPair, closed_form, default_depth, oracle_eval

    try:
        chars = CharacterPair.parse(args.chi1, args.chi2)
    except KeyError as exc:
        raise UsageError(f"unknown character {exc}") from None
    if (args.rep is None) == (args.matrix is None):
        raise UsageError("give exactly one of --rep and --matrix")
    probe = quadratic_extension(args.p, args.d, args.precision)
    rep = None
    if args.rep is not None:
        try:
            rep = Representative.parse(args.rep)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    depth = args.depth if args.depth is not None else default_depth(probe, rep)
    ext = _make_ext(args, depth)
    if rep is None:
        A = _read_matrix(ext, args.matrix)
        rep = classify(A) if args.mode == "closed" else None
    else:
        rep.validate(ext)
        A = rep.matrix(ext)

    tail = Fraction(0)
    if args.mode == "closed":
        f = closed_form(ext, rep, chars)
        value = None
    else:
        value = oracle_eval(ext, A, chars, depth)
        f, tail = value.assembled, value.tail_bound
    head = f"{rep.label() if rep is not None else args.matrix} {chars.label()} [{args.mode}]"
    if args.z is None:
        lines = [head, str(f)]
        if args.mode == "oracle":
            lines.append(f"tail_bound = {tail}")
        _emit(args, lines, {"function": f.records(), "tail_bound": str(tail)})
        return EXIT_OK
    z1, z2 = _parse_z(args.z)
    num = eval_at(f, ext.q, z1, z2)
    bound = value.bound_at(z1, z2) if value is not None else 0.0
    _emit(args, [head, f"L(z) = {num.real:.15g} {num.imag:+.15g}i  +/- {bound:.3g}"],
          {"re": num.real, "im": num.imag, "bound": bound})
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    from .spherical import verify_all

    ext = _make_ext(args)
    report = verify_all(ext, depth=args.depth, z_samples=args.samples, seed=args.seed,
                        mutate=args.mutate)
    _emit(args, report.lines(), report.records())
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_integral(args: argparse.Namespace) -> int:
    from .cells import measure_lemma_closed, norm_fiber_measure
    from .norm_integrals import (
        case1_integral_closed,
        character_integral,
        integral_lemma_closed,
        norm_integral_assembled,
        norm_shell_histogram,
    )
    from .laurent import equals

    ext = _make_ext(args)
    if args.kind == "measure":
        got = norm_fiber_measure(ext, args.n)
        want = measure_lemma_closed(ext.case.lemma_case, ext.q, ext.s, args.n)
        lines = [f"mu(v(N(x) - 1) = {args.n}) = {got}", f"closed form: {want}"]
        _emit(args, lines, {"enumerated": str(got), "closed": str(want)})
        return EXIT_OK if got == want else EXIT_VERIFY
    if args.kind == "character":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            got = character_integral(ext, ext.base.parse(args.theta), args.n, args.domain)
        lines = [f"integral of chi*(1 + theta pi^{args.n} N(x)) over {args.domain} = {got}"]
        lines += [f"warning: {w.message}" for w in caught]
        _emit(args, lines, {"value": str(got), "warnings": [str(w.message) for w in caught]})
        return EXIT_OK
    eta = ext.base.parse(args.eta)
    hist = norm_shell_histogram(ext, eta)
    assembled = norm_integral_assembled(ext, eta)
    if ext.case.wild:
        closed = integral_lemma_closed(ext, ext.chi_star(-eta))
    elif not ext.case.ramified and eta == ext.base(1):
        closed = case1_integral_closed(ext)
    else:
        closed = None
    lines = hist.lines() + [f"assembled: {assembled}"]
    ok = True
    if closed is not None:
        ok = equals(assembled, closed)
        lines += [f"closed:    {closed}", f"equal: {ok}"]
    _emit(args, lines, {"histogram": hist.lines(), "assembled": assembled.records(),
                        "equal": ok if closed is not None else None})
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hermsph", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("field", help="describe the quadratic extension")
    _field_args(p)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("classify", help="K-orbit representative of a Hermitian matrix")
    _field_args(p)
    p.add_argument("matrix", help="a;b;c_a,c_b")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("spherical", help="closed form or oracle value of L(x, chi1, chi2, z)")
    _field_args(p)
    p.add_argument("--rep", help="table entry, e.g. Hyperbolic0, Plane6(1), Diagonal(3,0,Delta,1)")
    p.add_argument("--matrix", help="a;b;c_a,c_b")
    p.add_argument("--chi1", choices=("1", "star"), default="1")
    p.add_argument("--chi2", choices=("1", "star"), default="1")
    p.add_argument("--mode", choices=("closed", "oracle"), default="closed")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--z", default=None, help="evaluate at z = 're,im;re,im'")
    p.set_defaults(func=cmd_spherical)

    p = sub.add_parser("verify", help="closed forms against the oracle, plus identities")
    _field_args(p)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutate", action="store_true", help="corrupt one closed form (control run)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integral", help="the measure, character and norm-power integrals")
    _field_args(p)
    p.add_argument("--kind", choices=("measure", "character", "norm"), default="norm")
    p.add_argument("-n", type=int, default=1, help="shell index (measure) or m (character)")
    p.add_argument("--theta", default="1")
    p.add_argument("--domain", choices=("O_F", "units"), default="O_F")
    p.add_argument("--eta", default="1")
    p.set_defaults(func=cmd_integral)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MathDomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except HermSphError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
