"""Decision procedure for finite/bounded generation of fixed subgroups.

For a 1-free non-elementary system (G, T) and automorphisms preserving T:

=====  ===========================================  ========================
beta   Delta(G)                                     verdict
=====  ===========================================  ========================
0      (trivial)                                    bounded, max(1, 2|E|)
1      {1, -1}                                      bounded, 2|V| + 1
1      not generated by an integer                  f.g., rank unbounded
1      generated by an integer other than -1        some Fix not f.g.
>= 2   (any)                                        some Fix not f.g.
=====  ===========================================  ========================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import Elementary, NonzeroBetti, NotOneFree, PreconditionViolated
from .graph import (
    LabelledGraph,
    Presentation,
    betti,
    bs_graph,
    derive_presentation,
    is_elementary,
    is_one_free,
)
from .modulus import ModulusSubgroup, generated_by_integer, is_pm_one, modulus_of_system
from .words import GroupWord, word_equal


class Verdict(enum.Enum):
    ALL_FG_BOUNDED = "ALL_FG_BOUNDED"
    ALL_FG_UNBOUNDED = "ALL_FG_UNBOUNDED"
    NOT_ALL_FG = "NOT_ALL_FG"


class Scope(enum.Enum):
    AUT_T_ONLY = "AUT_T_ONLY"
    ALL_AUT = "ALL_AUT"


class WitnessKind(enum.Enum):
    INTEGRAL_MODULUS = "INTEGRAL_MODULUS"
    NON_INTEGRAL_MODULUS = "NON_INTEGRAL_MODULUS"
    COMMUTATOR = "COMMUTATOR"


@dataclass(frozen=True)
class WitnessRef:
    kind: WitnessKind
    stable_letters: tuple[str, ...]
    description: str


NOTE_POINT_FREE = "automorphisms fixing no point of T have Fix of rank at most 2"
NOTE_SIGN_MINUS = "automorphisms of sign -1 have free Fix of rank at most 2|E| = {}"
NOTE_FINITE_ORDER = "finite-order automorphisms of any GBS group have finitely generated Fix"
NOTE_OPEN = (
    "open: whether some automorphism outside Aut^T(G) has a non-finitely generated Fix"
)
NOTE_TREE_BOUND = "finite generation holds for all of Aut(G); the rank bound is proved for Aut^T(G)"


@dataclass(frozen=True)
class Classification:
    betti: int
    num_vertices: int
    num_edges: int
    modulus: ModulusSubgroup
    stable_deltas: tuple[tuple[str, Fraction], ...]
    one_free: bool
    verdict: Verdict
    scope: Scope
    bound: int | None = None
    witness: WitnessRef | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        assert (self.bound is not None) == (self.verdict is Verdict.ALL_FG_BOUNDED)

    @property
    def finitely_generated(self) -> bool:
        return self.verdict is not Verdict.NOT_ALL_FG


def _check_domain(g: LabelledGraph):
    kind = is_elementary(g)
    if kind is not None:
        raise Elementary(kind.value)
    for eid, label in g.labels():
        if abs(label) == 1:
            raise NotOneFree(eid, label)


def classify(g: LabelledGraph, root: str | None = None) -> Classification:
    _check_domain(g)
    pres = derive_presentation(g, root)
    b = betti(g)
    mod, deltas = modulus_of_system(g, pres, check_elementary=False)
    nv, ne = len(g.vertices), len(g.edges)
    notes = [NOTE_POINT_FREE, NOTE_SIGN_MINUS.format(2 * ne), NOTE_FINITE_ORDER]
    common = dict(
        betti=b,
        num_vertices=nv,
        num_edges=ne,
        modulus=mod,
        stable_deltas=tuple(sorted(deltas.items())),
        one_free=True,
    )
    letters = pres.stable_letters
    if b == 0:
        return Classification(
            **common,
            verdict=Verdict.ALL_FG_BOUNDED,
            scope=Scope.ALL_AUT,
            bound=max(1, 2 * ne),
            notes=tuple(notes + [NOTE_TREE_BOUND]),
        )
    if b == 1:
        (t,) = letters
        if is_pm_one(mod):
            return Classification(
                **common,
                verdict=Verdict.ALL_FG_BOUNDED,
                scope=Scope.AUT_T_ONLY,
                bound=2 * nv + 1,
                notes=tuple(notes + [NOTE_OPEN]),
            )
        integral, n = generated_by_integer(mod)
        if not integral:
            return Classification(
                **common,
                verdict=Verdict.ALL_FG_UNBOUNDED,
                scope=Scope.AUT_T_ONLY,
                witness=WitnessRef(
                    WitnessKind.NON_INTEGRAL_MODULUS,
                    (t,),
                    f"twists t -> t x^(pN), N a power of the denominator of Delta({t}) = {deltas[t]}, "
                    "give fixed subgroups of arbitrarily large finite rank",
                ),
                notes=tuple(notes + [NOTE_OPEN]),
            )
        return Classification(
            **common,
            verdict=Verdict.NOT_ALL_FG,
            scope=Scope.AUT_T_ONLY,
            witness=WitnessRef(
                WitnessKind.INTEGRAL_MODULUS,
                (t,),
                f"twist {t} -> {t} x^(pN) with Delta(G) = <{n}>; its Fix is not finitely generated",
            ),
            notes=tuple(notes),
        )
    return Classification(
        **common,
        verdict=Verdict.NOT_ALL_FG,
        scope=Scope.AUT_T_ONLY,
        witness=_betti2_ref(deltas, letters),
        notes=tuple(notes),
    )


def _betti2_ref(deltas, letters) -> WitnessRef:
    for s in letters:
        if deltas[s] != 1:
            t = next(u for u in letters if u != s)
            return WitnessRef(
                WitnessKind.COMMUTATOR,
                (t, s),
                f"twist {t} -> {t} x^p fixing the ray [{t},{s}]^k v; Fix not finitely generated",
            )
    s = letters[0]
    return WitnessRef(
        WitnessKind.INTEGRAL_MODULUS,
        (s,),
        f"Delta({s}) = 1: twist {s} -> {s} x^(pN); Fix not finitely generated",
    )


def classify_bs(p: int, q: int) -> Classification:
    """Classify BS(p, q) = <x, t | x^p = t x^q t^-1>, requiring |q| >= |p| and |p| != 1."""
    if p == 0 or q == 0 or abs(q) < abs(p) or abs(p) == 1:
        raise PreconditionViolated(f"BS({p},{q}) needs |q| >= |p| and |p| != 1")
    c = classify(bs_graph(p, q))
    if p == -q:
        expected = Verdict.ALL_FG_BOUNDED
    elif q % p:
        expected = Verdict.ALL_FG_UNBOUNDED
    else:
        expected = Verdict.NOT_ALL_FG
    assert c.verdict is expected, (p, q, c.verdict)
    if p == -q:
        assert c.bound == 3
    if expected is not Verdict.NOT_ALL_FG:
        # BS(p, q) with p = -q or p not dividing q is algebraically rigid: Aut^T(G) = Aut(G)
        notes = tuple(n for n in c.notes if n != NOTE_OPEN)
        c = Classification(**{**c.__dict__, "scope": Scope.ALL_AUT, "notes": notes})
    return c


def normalise_bs(p: int, q: int) -> tuple[int, int]:
    """BS(p, q) and BS(q, p) are isomorphic; order so that |q| >= |p|."""
    return (p, q) if abs(q) >= abs(p) else (q, p)


@dataclass(frozen=True)
class CenterInfo:
    root: str
    exponent: int
    ratios: tuple[tuple[str, Fraction], ...]


def center_exponent(g: LabelledGraph, root: str | None = None) -> CenterInfo:
    """Least c > 0 with root^c in every vertex group of the tree; root^c then generates the centre.

    Propagates ``root = v^(m_v)`` along the tree: across an edge with label
    ``a`` at the near vertex and ``b`` at the far one, ``m_far = m_near * b / a``,
    and ``root^n`` reaches the far vertex group only if ``n * m_near`` is a
    multiple of ``a``.
    """
    if betti(g) != 0:
        raise NonzeroBetti(f"centre computation needs a tree; Betti number is {betti(g)}")
    pres = derive_presentation(g, root)
    info = g.letters
    m = {pres.root: Fraction(1)}
    c = {pres.root: 1}
    for v in g.vertices:
        near = pres.root
        for letter in pres.path_from_root(v):
            _, far, a, b = info[letter]
            if far not in m:
                mn = m[near]
                need = abs(a * mn.denominator) // math.gcd(a * mn.denominator, mn.numerator)
                c[far] = c[near] * need // math.gcd(c[near], need)
                m[far] = mn * Fraction(b, a)
            near = far
    exp = 1
    for v in c.values():
        exp = exp * v // math.gcd(exp, v)
    z = GroupWord.generator(pres, pres.root, exp)
    for s in pres.generators:
        x = GroupWord.generator(pres, s)
        assert word_equal(x * z * x.inverse(), z), s
    return CenterInfo(pres.root, exp, tuple(sorted(m.items())))
