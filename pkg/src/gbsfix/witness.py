"""Twist automorphisms whose fixed subgroups are large, and their verification.

For a stable letter ``t`` and a vertex generator ``x`` with
``x^p t = t x^(p D)`` (``D = Delta(t)``), the twist ``phi_N: t -> t x^(pN)``
satisfies ``phi_N(t^k) = t^k x^(pN l_k)`` with ``l_k = 1 + D + ... + D^(k-1)``
as long as every ``N l_i`` (``i < k``) is an integer.  The vertices
``t^k v`` of that prefix are then fixed and lie in distinct Fix-orbits.

With two stable letters ``s, t`` the twist ``t -> t x^p`` instead fixes
the ray ``[t,s]^k v``; see :func:`solve_twist_parameter`.

Infinite generation is a theorem; what is checked here are its finite
consequences up to a chosen depth.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .autos import Automorphism, GeneratorMap, Sign, check_automorphism, compute_sign
from .errors import GbsError, NoSuitableStableLetter, PreconditionViolated, SearchExhausted
from .graph import LabelledGraph, Presentation, betti, derive_presentation
from .modulus import factorize, stable_letter_delta
from .words import GroupWord, coset_key, vertex_power, word_equal

MAX_MULTIPLES = 10**6
MAX_EXPONENT = 64


class FamilyKind(enum.Enum):
    INTEGRAL_MODULUS = "INTEGRAL_MODULUS"
    NON_INTEGRAL_MODULUS = "NON_INTEGRAL_MODULUS"
    COMMUTATOR = "COMMUTATOR"


@dataclass(frozen=True)
class TwistRecipe:
    """``phi: t^o -> t^o x^(pN)`` (``o`` = orientation), all other generators fixed."""

    presentation: Presentation = field(repr=False)
    letter: str
    orientation: int
    vertex: str
    p: int
    N: int
    kind: FamilyKind
    delta: Fraction
    partner: str | None = None
    gamma: Fraction | None = None
    prime: int | None = None
    target_rank: int | None = None
    prefix: int | None = None  # M_N; None means unbounded

    @property
    def exponent(self) -> int:
        return self.p * self.N

    def letter_word(self) -> GroupWord:
        return GroupWord.generator(self.presentation, self.letter, self.orientation)

    def x(self, k: int = 1) -> GroupWord:
        return GroupWord.generator(self.presentation, self.vertex, k)

    def describe(self) -> str:
        t = self.letter if self.orientation == 1 else f"{self.letter}^-1"
        return f"{t} -> {t} {self.vertex}^{self.exponent}"

    def generator_map(self) -> GeneratorMap:
        pres = self.presentation
        t = GroupWord.generator(pres, self.letter)
        m = self.exponent
        if self.orientation == 1:
            img, inv = t * self.x(m), t * self.x(-m)
        else:
            # t^-1 -> t^-1 x^m  is  t -> x^-m t
            img, inv = self.x(-m) * t, self.x(m) * t
        return GeneratorMap.build(pres, {self.letter: img}, {self.letter: inv})

    def automorphism(self) -> Automorphism:
        return check_automorphism(self.generator_map(), "twist")


def geometric_l(delta: Fraction, k: int) -> Fraction:
    """``l_k = sum_{j<k} delta^j``."""
    return sum((delta**j for j in range(k)), Fraction(0))


def integral_prefix(delta: Fraction, N: int, limit: int) -> int:
    """``M_N``: largest ``M <= limit`` with ``N l_i`` integral for all ``i < M``."""
    for i in range(limit):
        if (N * geometric_l(delta, i)).denominator != 1:
            return i
    return limit


def _commutes_through(pres, x_vertex, u: GroupWord, p: int, delta: Fraction) -> bool:
    q = p * delta
    if q.denominator != 1:
        return False
    x = lambda k: GroupWord.generator(pres, x_vertex, k)
    return word_equal(x(p) * u, u * x(int(q)))


def _oriented_letters(pres: Presentation):
    for t in pres.stable_letters:
        d = stable_letter_delta(pres, t)
        yield t, 1, d
        yield t, -1, 1 / d


def _twist_vertex(pres: Presentation, letter: str, orientation: int) -> str:
    # the vertex where the oriented letter arrives: x^m there commutes with the
    # edge group, so t -> t x^m is a homomorphism for every m
    e = pres.graph.edge(letter)
    return e.terminal if orientation == 1 else e.initial


def _smallest_p(pres, vertex, u, delta) -> int:
    step = delta.denominator
    for j in range(1, MAX_MULTIPLES + 1):
        if _commutes_through(pres, vertex, u, step * j, delta):
            return step * j
    raise SearchExhausted(f"x^p t = t x^(p Delta) for {vertex}", MAX_MULTIPLES)


def build_integral_witness(
    g: LabelledGraph, pres: Presentation | None = None, N: int = 1
) -> TwistRecipe:
    """The twist ``phi_N`` for a stable letter with ``Delta`` in ``Z - {-1}``."""
    pres = pres or derive_presentation(g)
    if N == 0:
        raise PreconditionViolated("N must be nonzero")
    if betti(g) < 1:
        raise PreconditionViolated("integral witness needs a stable letter")
    for t, o, d in _oriented_letters(pres):
        if d.denominator == 1 and d != -1:
            v = _twist_vertex(pres, t, o)
            u = GroupWord.generator(pres, t, o)
            p = _smallest_p(pres, v, u, d)
            return TwistRecipe(pres, t, o, v, p, N, FamilyKind.INTEGRAL_MODULUS, d)
    raise NoSuitableStableLetter("no stable letter has Delta in Z - {-1} in either orientation")


def _radical(n: int) -> int:
    return math.prod(factorize(n))


def build_unbounded_family(
    g: LabelledGraph, pres: Presentation | None = None, R: int = 2
) -> TwistRecipe:
    """Smallest ``N = rad(b)^m`` whose twist fixes a ray prefix of length ``M_N >= R``.

    ``Delta(t) = a/b`` in lowest terms with ``|a|, |b| != 1``.
    """
    pres = pres or derive_presentation(g)
    if betti(g) != 1:
        raise PreconditionViolated("unbounded-rank family needs Betti number 1")
    if R < 1:
        raise PreconditionViolated("target rank must be positive")
    (t,) = pres.stable_letters
    d = stable_letter_delta(pres, t)
    if abs(d.numerator) == 1 or abs(d.denominator) == 1:
        raise PreconditionViolated(f"Delta({t}) = {d}: numerator or denominator is +-1")
    v = _twist_vertex(pres, t, 1)
    p = _smallest_p(pres, v, GroupWord.generator(pres, t), d)
    base = _radical(d.denominator)
    prime = min(factorize(d.denominator))
    for m in range(MAX_EXPONENT + 1):
        N = base**m
        M = integral_prefix(d, N, R)
        if M >= R:
            M = integral_prefix(d, N, R + 64 * (m + 1))
            return TwistRecipe(
                pres, t, 1, v, p, N, FamilyKind.NON_INTEGRAL_MODULUS, d,
                prime=prime, target_rank=R, prefix=M,
            )
    raise SearchExhausted(f"N = {base}^m with M_N >= {R}", MAX_EXPONENT)


def commutator(pres: Presentation, t: str, s: str) -> GroupWord:
    tw, sw = GroupWord.generator(pres, t), GroupWord.generator(pres, s)
    return tw * sw * tw.inverse() * sw.inverse()


def twist_conditions(pres, vertex: str, s: str, t: str, p: int) -> dict[str, bool] | None:
    """The four conditions on ``p`` for the two-letter twist, or None if ``gamma`` is fractional."""
    ds, dt = stable_letter_delta(pres, s), stable_letter_delta(pres, t)
    gamma = p * (ds - 1) / (ds * dt)
    x = lambda k: GroupWord.generator(pres, vertex, k)
    sw, tw = GroupWord.generator(pres, s), GroupWord.generator(pres, t)
    conds = {"integral_gamma": gamma.denominator == 1}
    if not conds["integral_gamma"]:
        return None
    shifted = p * (ds - 1)
    conds["x^p s = s x^(p D(s))"] = _commutes_through(pres, vertex, sw, p, ds)
    if shifted.denominator != 1:
        conds["x^(p(D(s)-1)) t^-1 s^-1 = t^-1 s^-1 x^gamma"] = False
    else:
        ts_inv = (sw * tw).inverse()
        conds["x^(p(D(s)-1)) t^-1 s^-1 = t^-1 s^-1 x^gamma"] = word_equal(
            x(int(shifted)) * ts_inv, ts_inv * x(int(gamma))
        )
    c = commutator(pres, t, s)
    conds["x^gamma commutes with [t,s]"] = word_equal(x(int(gamma)) * c, c * x(int(gamma)))
    return conds


def solve_twist_parameter(
    g: LabelledGraph, pres: Presentation, s: str, t: str, vertex: str | None = None
) -> tuple[int, Fraction]:
    """Smallest ``p > 0`` meeting all four conditions, with ``gamma = p (D(s) - 1) / (D(s) D(t))``."""
    if betti(g) < 2:
        raise PreconditionViolated("commutator witness needs Betti number >= 2")
    if s == t or s not in pres.stable_letters or t not in pres.stable_letters:
        raise PreconditionViolated("s and t must be distinct stable letters")
    ds, dt = stable_letter_delta(pres, s), stable_letter_delta(pres, t)
    if ds == 1:
        raise PreconditionViolated(f"Delta({s}) = 1: use the integral witness instead")
    if vertex is None:
        vertex = _twist_vertex(pres, t, 1)
    step = ((ds - 1) / (ds * dt)).denominator
    for j in range(1, MAX_MULTIPLES + 1):
        p = step * j
        conds = twist_conditions(pres, vertex, s, t, p)
        if conds and all(conds.values()):
            gamma = p * (ds - 1) / (ds * dt)
            assert gamma != 0
            return p, gamma
    raise SearchExhausted(f"twist parameter for [{t},{s}]", MAX_MULTIPLES)


def build_commutator_witness(
    g: LabelledGraph, pres: Presentation | None = None, s: str | None = None, t: str | None = None
) -> TwistRecipe:
    pres = pres or derive_presentation(g)
    letters = pres.stable_letters
    if len(letters) < 2:
        raise PreconditionViolated("commutator witness needs Betti number >= 2")
    if s is None:
        s = next((u for u in letters if stable_letter_delta(pres, u) != 1), None)
        if s is None:
            raise PreconditionViolated("every stable letter has Delta = 1: use the integral witness")
    if t is None:
        t = next(u for u in letters if u != s)
    v = _twist_vertex(pres, t, 1)
    p, gamma = solve_twist_parameter(g, pres, s, t, v)
    return TwistRecipe(
        pres, t, 1, v, p, 1, FamilyKind.COMMUTATOR, stable_letter_delta(pres, t),
        partner=s, gamma=gamma,
    )


# --- verification ----------------------------------------------------------


@dataclass(frozen=True)
class VerificationEntry:
    """Check at depth ``k``.  ``None`` marks a check that does not apply."""

    k: int
    l: Fraction
    integral: bool
    identity: bool | None
    symbolic_l: Fraction | None
    ray_fixed: bool | None

    @property
    def passed(self) -> bool:
        if self.identity is None:
            return True
        return self.identity and bool(self.ray_fixed) and self.symbolic_l == self.l


@dataclass(frozen=True)
class PlateauEvidence:
    k: int
    label: int
    divisible: bool


@dataclass(frozen=True)
class VerificationReport:
    kind: FamilyKind
    depth: int
    automorphism_ok: bool
    sign: Sign | None
    entries: tuple[VerificationEntry, ...]
    distinct_checked: int
    collisions: tuple[tuple[int, int], ...]
    prefix: int | None = None
    prime: int | None = None
    plateau: tuple[PlateauEvidence, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return (
            self.automorphism_ok
            and self.sign is not Sign.MINUS
            and all(e.passed for e in self.entries)
            and not self.collisions
            and all(e.divisible for e in self.plateau)
        )


def _exact(value: Fraction) -> int:
    if value.denominator != 1:
        raise AssertionError(f"non-integral exponent {value} reached a word constructor")
    return value.numerator


def verify_witness(r: TwistRecipe, depth: int) -> VerificationReport:
    if r.kind is FamilyKind.COMMUTATOR:
        return _verify_commutator(r, depth)
    pres = r.presentation
    notes = []
    try:
        phi = r.automorphism()
        sign = compute_sign(phi, radius=0)
    except GbsError as exc:  # recorded, not raised
        return VerificationReport(r.kind, depth, False, None, (), 0, (), notes=(str(exc),))
    u = r.letter_word()
    M = r.prefix if r.kind is FamilyKind.NON_INTEGRAL_MODULUS else None
    entries = []
    keys = []
    uk = GroupWord.identity(pres)
    for k in range(depth + 1):
        l = geometric_l(r.delta, k)
        integral = (r.N * l).denominator == 1
        prefix_ok = M is None or k <= M
        if prefix_ok:
            img = phi(uk)
            ident = word_equal(img, uk * r.x(_exact(r.exponent * l)))
            m = vertex_power(uk.inverse() * img, r.vertex)
            sym = None if m is None else Fraction(m, r.exponent)
            fixed = coset_key(img, r.vertex) == coset_key(uk, r.vertex)
            entries.append(VerificationEntry(k, l, integral, ident, sym, fixed))
            if M is None or k < M:
                keys.append((k, l, coset_key(uk, r.vertex)))
        else:
            entries.append(VerificationEntry(k, l, integral, None, None, None))
        uk = uk * u
    collisions = []
    checked = 0
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            checked += 1
            if keys[i][1] == keys[j][1] or keys[i][2] == keys[j][2]:
                collisions.append((keys[i][0], keys[j][0]))
    plateau = ()
    if r.kind is FamilyKind.NON_INTEGRAL_MODULUS:
        e = pres.graph.edge(r.letter)
        label = e.label_initial if r.orientation == 1 else e.label_terminal
        # every edge t^k e (k < M_N - 1) joining consecutive ray vertices carries this label
        plateau = tuple(
            PlateauEvidence(k, label, label % r.prime == 0) for k in range(max(0, min(M, depth + 1) - 1))
        )
        if depth >= M:
            notes.append(f"N*l_{M} = {r.N * geometric_l(r.delta, M)} is not an integer")
    return VerificationReport(
        r.kind, depth, True, sign, tuple(entries), checked, tuple(collisions),
        prefix=M, prime=r.prime, plateau=plateau, notes=tuple(notes),
    )


def _verify_commutator(r: TwistRecipe, depth: int) -> VerificationReport:
    pres = r.presentation
    try:
        phi = r.automorphism()
        sign = compute_sign(phi, radius=0)
    except GbsError as exc:
        return VerificationReport(r.kind, depth, False, None, (), 0, (), notes=(str(exc),))
    c = commutator(pres, r.letter, r.partner)
    gamma = _exact(r.gamma)
    entries = []
    keys = []
    ck = GroupWord.identity(pres)
    for k in range(depth + 1):
        img = phi(ck)
        ident = word_equal(img, ck * r.x(k * gamma))
        m = vertex_power(ck.inverse() * img, r.vertex)
        sym = None if m is None else Fraction(m, gamma)
        fixed = coset_key(img, r.vertex) == coset_key(ck, r.vertex)
        entries.append(VerificationEntry(k, Fraction(k), True, ident, sym, fixed))
        keys.append((k, coset_key(ck, r.vertex)))
        ck = ck * c
    collisions = []
    checked = 0
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            checked += 1
            if keys[i][1] == keys[j][1]:
                collisions.append((keys[i][0], keys[j][0]))
    return VerificationReport(r.kind, depth, True, sign, tuple(entries), checked, tuple(collisions))


def witness_for(
    g: LabelledGraph, root: str | None = None, N: int = 1, rank: int | None = None
) -> TwistRecipe | None:
    """The witness matching ``classify(g)``; None for bounded verdicts."""
    from .classify import Verdict, WitnessKind, classify

    c = classify(g, root)
    if c.verdict is Verdict.ALL_FG_BOUNDED:
        return None
    pres = derive_presentation(g, root)
    kind = c.witness.kind
    if kind is WitnessKind.NON_INTEGRAL_MODULUS:
        return build_unbounded_family(g, pres, rank or 3)
    if kind is WitnessKind.COMMUTATOR:
        t, s = c.witness.stable_letters
        return build_commutator_witness(g, pres, s, t)
    return build_integral_witness(g, pres, N)
