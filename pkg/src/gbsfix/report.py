"""JSON reports.  Integers are written as decimal strings, rationals as {"num", "den"}."""

from __future__ import annotations

import json
from fractions import Fraction

from .classify import Classification
from .graph import LabelledGraph, Presentation, betti, derive_presentation, is_elementary, is_one_free
from .modulus import generated_by_integer, is_pm_one, modulus_of_system
from .witness import TwistRecipe, VerificationReport


def rational(r: Fraction | int) -> dict:
    r = Fraction(r)
    return {"num": str(r.numerator), "den": str(r.denominator)}


def _opt(x, f=str):
    return None if x is None else f(x)


def system_json(g: LabelledGraph, pres: Presentation | None = None) -> dict:
    pres = pres or derive_presentation(g)
    kind = is_elementary(g)
    mod, deltas = modulus_of_system(g, pres, check_elementary=False)
    integer = None
    if mod.is_cyclic():
        ok, n = generated_by_integer(mod)
        integer = str(n) if ok else None
    return {
        "vertices": list(g.vertices),
        "edges": [
            {
                "id": e.id,
                "from": e.initial,
                "to": e.terminal,
                "labels": [str(e.label_initial), str(e.label_terminal)],
                "stable": e.id in pres.stable_letters,
            }
            for e in g.edges
        ],
        "root": pres.root,
        "betti": str(betti(g)),
        "one_free": is_one_free(g),
        "elementary": None if kind is None else kind.value,
        "modulus": {
            "generators": [rational(r) for r in mod.generators()],
            "canonical": str(mod),
            "pm_one": is_pm_one(mod),
            "integer_generator": integer,
            "stable_letters": {t: rational(d) for t, d in sorted(deltas.items())},
        },
    }


def classification_json(c: Classification) -> dict:
    return {
        "verdict": c.verdict.value,
        "bound": _opt(c.bound),
        "scope": c.scope.value,
        "finitely_generated": c.finitely_generated,
        "witness": None
        if c.witness is None
        else {
            "kind": c.witness.kind.value,
            "stable_letters": list(c.witness.stable_letters),
            "description": c.witness.description,
        },
        "notes": list(c.notes),
    }


def recipe_json(r: TwistRecipe) -> dict:
    return {
        "kind": r.kind.value,
        "map": r.describe(),
        "stable_letter": r.letter,
        "orientation": str(r.orientation),
        "vertex": r.vertex,
        "p": str(r.p),
        "N": str(r.N),
        "delta": rational(r.delta),
        "partner": r.partner,
        "gamma": _opt(r.gamma, rational),
        "prime": _opt(r.prime),
        "target_rank": _opt(r.target_rank),
        "prefix": _opt(r.prefix),
    }


def verification_json(rep: VerificationReport) -> dict:
    return {
        "passed": rep.passed,
        "depth": str(rep.depth),
        "automorphism_ok": rep.automorphism_ok,
        "sign": None if rep.sign is None else rep.sign.name,
        "entries": [
            {
                "k": str(e.k),
                "l": rational(e.l),
                "integral": e.integral,
                "identity": e.identity,
                "symbolic_l": _opt(e.symbolic_l, rational),
                "ray_fixed": e.ray_fixed,
                "passed": e.passed,
            }
            for e in rep.entries
        ],
        "distinct_pairs_checked": str(rep.distinct_checked),
        "collisions": [[str(a), str(b)] for a, b in rep.collisions],
        "prefix": _opt(rep.prefix),
        "prime": _opt(rep.prime),
        "plateau": [
            {"k": str(p.k), "label": str(p.label), "divisible": p.divisible} for p in rep.plateau
        ],
        "notes": list(rep.notes),
    }


def build_report(
    g: LabelledGraph,
    pres: Presentation | None = None,
    classification: Classification | None = None,
    recipe: TwistRecipe | None = None,
    verification: VerificationReport | None = None,
    warnings: list[str] | None = None,
) -> dict:
    return {
        "system": system_json(g, pres),
        "classification": _opt(classification, classification_json),
        "witness": _opt(recipe, recipe_json),
        "verification": _opt(verification, verification_json),
        "warnings": list(warnings or []),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"
