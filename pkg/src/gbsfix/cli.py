"""Command line interface.

Exit codes: 0 all fixed subgroups finitely generated (or command succeeded),
10 some fixed subgroup is not finitely generated, 2 malformed input,
3 precondition violated (not 1-free, elementary, ...), 1 anything else
(failed verification, exhausted search).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .classify import Classification, Verdict, center_exponent, classify, classify_bs, normalise_bs
from .dsl import load
from .errors import GbsError, InputError, PreconditionViolated
from .graph import bs_graph, derive_presentation
from .modulus import modulus_of_system
from .report import build_report, dumps
from .autos import compute_sign
from .witness import (
    FamilyKind,
    build_commutator_witness,
    build_integral_witness,
    build_unbounded_family,
    verify_witness,
)
from .words import parse_word, tree_ball

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION, EXIT_NOT_FG = 0, 1, 2, 3, 10


def _verdict_code(c: Classification) -> int:
    return EXIT_NOT_FG if c.verdict is Verdict.NOT_ALL_FG else EXIT_OK


def _print_classification(c: Classification, out):
    print(f"betti: {c.betti}", file=out)
    print(f"modulus: {c.modulus}", file=out)
    for t, d in c.stable_deltas:
        print(f"  Delta({t}) = {d}", file=out)
    print(f"verdict: {c.verdict.value}", file=out)
    if c.bound is not None:
        print(f"bound: {c.bound}", file=out)
    print(f"scope: {c.scope.value}", file=out)
    if c.witness is not None:
        print(f"witness: {c.witness.kind.value}: {c.witness.description}", file=out)
    for n in c.notes:
        print(f"note: {n}", file=out)


def _load(args):
    doc = load(args.file)
    root = getattr(args, "root", None) or doc.root
    g = doc.to_graph()
    return doc, g, derive_presentation(g, root)


def cmd_classify(args, out):
    _, g, pres = _load(args)
    c = classify(g, pres.root)
    if args.json:
        out.write(dumps(build_report(g, pres, c)))
    else:
        _print_classification(c, out)
    return _verdict_code(c)


def cmd_bs(args, out):
    p, q = normalise_bs(args.p, args.q)
    c = classify_bs(p, q)
    if args.json:
        out.write(dumps(build_report(bs_graph(p, q), classification=c)))
    else:
        print(f"BS({p},{q})", file=out)
        _print_classification(c, out)
    return _verdict_code(c)


def cmd_delta(args, out):
    _, g, pres = _load(args)
    mod, deltas = modulus_of_system(g, pres)
    for t, d in sorted(deltas.items()):
        print(f"Delta({t}) = {d}", file=out)
    print(f"Delta(G) = {mod}", file=out)
    return EXIT_OK


def cmd_word(args, out):
    _, _, pres = _load(args)
    print(parse_word(args.word, pres), file=out)
    return EXIT_OK


def cmd_witness(args, out):
    _, g, pres = _load(args)
    c = classify(g, pres.root)
    if c.verdict is Verdict.ALL_FG_BOUNDED:
        if args.json:
            out.write(dumps(build_report(g, pres, c, warnings=["bounded verdict: no witness needed"])))
        else:
            print(f"verdict {c.verdict.value} (bound {c.bound}): no witness needed", file=out)
        return EXIT_OK
    kind = c.witness.kind.value
    if kind == FamilyKind.NON_INTEGRAL_MODULUS.value:
        r = build_unbounded_family(g, pres, args.rank or 3)
        depth = args.depth if args.depth is not None else r.prefix
    elif kind == FamilyKind.COMMUTATOR.value:
        t, s = c.witness.stable_letters
        r = build_commutator_witness(g, pres, s, t)
        depth = args.depth if args.depth is not None else 5
    else:
        r = build_integral_witness(g, pres, args.N)
        depth = args.depth if args.depth is not None else 5
    rep = verify_witness(r, depth)
    if args.json:
        out.write(dumps(build_report(g, pres, c, r, rep)))
    else:
        print(f"witness: {r.kind.value}", file=out)
        print(f"map: {r.describe()} (p = {r.p}, N = {r.N})", file=out)
        if r.gamma is not None:
            print(f"gamma: {r.gamma}", file=out)
        if r.prefix is not None:
            print(f"M_N: {r.prefix}", file=out)
        for e in rep.entries:
            status = "skip" if e.identity is None else ("ok" if e.passed else "FAIL")
            print(f"  k={e.k} l={e.l} {status}", file=out)
        print(f"distinct pairs: {rep.distinct_checked}, collisions: {len(rep.collisions)}", file=out)
        for n in rep.notes:
            print(f"note: {n}", file=out)
        print("verification: " + ("passed" if rep.passed else "FAILED"), file=out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_ball(args, out):
    _, _, pres = _load(args)
    ball = tree_ball(pres, args.base, args.radius)
    if args.dot:
        out.write(ball.to_dot())
    else:
        for v in ball.vertices:
            print(f"{v.name}  depth={v.depth}", file=out)
        for a, b in ball.edges:
            print(f"{ball.vertices[a].name} -- {ball.vertices[b].name}", file=out)
    return EXIT_OK


def cmd_center(args, out):
    _, g, pres = _load(args)
    info = center_exponent(g, pres.root)
    print(f"center: <{info.root}^{info.exponent}>", file=out)
    print(f"exponent: {info.exponent}", file=out)
    return EXIT_OK


def cmd_check_auto(args, out):
    doc, _, pres = _load(args)
    a = doc.automorphism(args.name, pres)
    print(f"{args.name}: automorphism ({a.compatibility})", file=out)
    print(f"sign: {compute_sign(a).name}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gbsfix", description="Fixed subgroups of GBS group automorphisms.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_file(name, func, help, root=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("file")
        if root:
            sp.add_argument("--root", help="root vertex of the spanning tree")
        sp.set_defaults(func=func)
        return sp

    sp = with_file("classify", cmd_classify, "classify a .gbs system")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("bs", help="classify BS(P, Q)")
    sp.add_argument("p", type=int)
    sp.add_argument("q", type=int)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_bs)

    with_file("delta", cmd_delta, "modulus of each stable letter and of G")

    sp = with_file("word", cmd_word, "normal form of a word")
    sp.add_argument("word")

    sp = with_file("witness", cmd_witness, "build and verify a witness automorphism")
    sp.add_argument("--N", type=int, default=1, help="scaling of the integral twist")
    sp.add_argument("--rank", type=int, help="target rank for the unbounded family")
    sp.add_argument("--depth", type=int, help="verification depth K")
    sp.add_argument("--json", action="store_true")

    sp = with_file("ball", cmd_ball, "ball in the Bass-Serre tree", root=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--base", help="fundamental-domain vertex at the centre")
    sp.add_argument("--dot", action="store_true")

    with_file("center", cmd_center, "generator of the centre (trees only)")

    sp = with_file("check-auto", cmd_check_auto, "validate an automorphism declared in the file")
    sp.add_argument("name")
    return ap


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except PreconditionViolated as exc:
        print(f"precondition: {exc}", file=err)
        return EXIT_PRECONDITION
    except GbsError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run_cli())
