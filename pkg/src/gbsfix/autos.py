"""Automorphisms given by generator images.

Membership in Aut^T(G) is not decided in general.  A validated map is
tagged with the class it was certified in: ``identity``, ``twist``
(vertex generators fixed, each stable letter ``t`` sent to ``t`` times a
vertex-generator power), ``inversion`` (vertex generators inverted, stable
letters as for twists), ``inner``, ``composite`` of certified maps, or
``unverified``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .errors import NotHomomorphism, NotInvertible, UnknownGenerator
from .graph import Presentation, format_relator
from .words import GroupWord, coset_key, max_radius, parse_word, tree_ball

CERTIFIED = {"identity", "twist", "inversion", "inner", "composite"}


@dataclass(frozen=True)
class GeneratorMap:
    presentation: Presentation
    images: tuple[tuple[str, GroupWord], ...]
    inverse_images: tuple[tuple[str, GroupWord], ...]

    @classmethod
    def build(
        cls,
        pres: Presentation,
        images: Mapping[str, GroupWord | str],
        inverse: Mapping[str, GroupWord | str],
    ) -> GeneratorMap:
        """Generators missing from ``images``/``inverse`` map to themselves."""

        def norm(m):
            out = {}
            for sym, w in m.items():
                name = pres.resolve(sym)
                if name is None:
                    raise UnknownGenerator(sym)
                out[name] = parse_word(w, pres) if isinstance(w, str) else w
            return tuple(
                (g, out.get(g, GroupWord.generator(pres, g))) for g in pres.generators
            )

        return cls(pres, norm(images), norm(inverse))

    def image(self, symbol: str) -> GroupWord:
        return dict(self.images)[symbol]

    def inverse_image(self, symbol: str) -> GroupWord:
        return dict(self.inverse_images)[symbol]


def _substitute(pres: Presentation, images: Mapping[str, GroupWord], w: GroupWord) -> GroupWord:
    out = GroupWord.identity(pres)
    for sym, k in w.generator_word():
        out = out * images[sym] ** k
    return out


def _substitute_gens(pres, images, word) -> GroupWord:
    out = GroupWord.identity(pres)
    for sym, k in word:
        out = out * images[sym] ** k
    return out


class Sign(enum.Enum):
    PLUS = 1
    MINUS = -1
    UNDEFINED = 0


@dataclass(frozen=True)
class Automorphism:
    map: GeneratorMap
    compatibility: str

    @property
    def presentation(self) -> Presentation:
        return self.map.presentation

    @property
    def certified(self) -> bool:
        return self.compatibility in CERTIFIED

    def __call__(self, w: GroupWord) -> GroupWord:
        return apply(self, w)

    def inverse(self) -> Automorphism:
        m = self.map
        return Automorphism(GeneratorMap(m.presentation, m.inverse_images, m.images), self.compatibility)


def _classify_map(m: GeneratorMap) -> str:
    pres = m.presentation
    imgs = dict(m.images)
    gen = lambda s, k=1: GroupWord.generator(pres, s, k)
    verts = pres.vertex_generators
    if all(imgs[g] == gen(g) for g in pres.generators):
        return "identity"
    if all(imgs[v] == gen(v) for v in verts):
        kind = "twist"
    elif all(imgs[v] == gen(v, -1) for v in verts):
        kind = "inversion"
    else:
        return "unverified"
    def vertex_power(w):
        gw = w.generator_word()
        return len(gw) <= 1 and all(s in verts for s, _ in gw)

    for t in pres.stable_letters:
        # t -> t z or t -> z t with z a vertex-generator power
        if not (vertex_power(gen(t, -1) * imgs[t]) or vertex_power(imgs[t] * gen(t, -1))):
            return "unverified"
    return kind


def check_automorphism(m: GeneratorMap, compatibility: str | None = None) -> Automorphism:
    """Verify relators map to 1 under the map and its declared inverse, and that both compose to the identity."""
    pres = m.presentation
    imgs, inv = dict(m.images), dict(m.inverse_images)
    for rel in pres.relators:
        if not _substitute_gens(pres, imgs, rel).is_identity():
            raise NotHomomorphism(format_relator(rel))
    for rel in pres.relators:
        if not _substitute_gens(pres, inv, rel).is_identity():
            raise NotInvertible(rel[0][0], f"inverse map sends relator {format_relator(rel)} to a nontrivial element")
    for g in pres.generators:
        gw = GroupWord.generator(pres, g)
        if _substitute(pres, imgs, inv[g]) != gw:
            raise NotInvertible(g, "map(inverse(g)) != g")
        if _substitute(pres, inv, imgs[g]) != gw:
            raise NotInvertible(g, "inverse(map(g)) != g")
    return Automorphism(m, compatibility or _classify_map(m))


def apply(a: Automorphism, w: GroupWord) -> GroupWord:
    return _substitute(a.presentation, dict(a.map.images), w)


def compose(a: Automorphism, b: Automorphism) -> Automorphism:
    """``a`` after ``b``."""
    pres = a.presentation
    images = {g: apply(a, b.map.image(g)) for g in pres.generators}
    inverse = {g: apply(b.inverse(), a.map.inverse_image(g)) for g in pres.generators}
    tag = "composite" if a.certified and b.certified else "unverified"
    return check_automorphism(GeneratorMap.build(pres, images, inverse), tag)


def inner(pres: Presentation, g: GroupWord) -> Automorphism:
    """Conjugation ``h -> g h g^-1``."""
    gi = g.inverse()
    images = {s: g * GroupWord.generator(pres, s) * gi for s in pres.generators}
    inverse = {s: gi * GroupWord.generator(pres, s) * g for s in pres.generators}
    return check_automorphism(GeneratorMap.build(pres, images, inverse), "inner")


def identity(pres: Presentation) -> Automorphism:
    return check_automorphism(GeneratorMap.build(pres, {}, {}))


def _stabiliser_sign(a: Automorphism, w: GroupWord, vertex: str) -> Sign:
    x = GroupWord.generator(a.presentation, vertex)
    s = w * x * w.inverse()
    img = apply(a, s)
    if img == s:
        return Sign.PLUS
    if img == s.inverse():
        return Sign.MINUS
    return Sign.UNDEFINED


def compute_sign(a: Automorphism, radius: int | None = None) -> Sign:
    """Sign of ``a``: +1 / -1 if it fixes a tree vertex acting as identity / inversion on its stabiliser.

    The fundamental-domain vertex generators are checked first; otherwise
    cosets in the ball around the root are searched.  The criterion
    "phi(s) = s^(+-1) for the stabiliser generator s" detects a fixed vertex
    in 1-free systems, where a vertex generator fixes no edge.
    """
    pres = a.presentation
    signs = {_stabiliser_sign(a, GroupWord.identity(pres), v) for v in pres.vertex_generators}
    if signs == {Sign.PLUS}:
        return Sign.PLUS
    if signs == {Sign.MINUS}:
        return Sign.MINUS
    if Sign.UNDEFINED not in signs:
        # mixed signs on commensurable stabilisers: not a compatible map
        return Sign.UNDEFINED
    limit = max_radius() if radius is None else radius
    ball = tree_ball(pres, pres.root, limit)
    for bv in ball.vertices[1:]:
        s = _stabiliser_sign(a, bv.word, bv.vertex)
        if s is not Sign.UNDEFINED:
            return s
    return Sign.UNDEFINED


def induced_vertex_map(a: Automorphism, w: GroupWord, vertex: str) -> tuple:
    """Coset key of ``phi . (w G_v) = phi(w) G_v`` for ``a`` fixing the fundamental vertex ``v``."""
    return coset_key(apply(a, w), vertex)
