"""Exact word arithmetic in the fundamental group of a graph of Z's.

Elements are stored as Bass-Serre path words based at the presentation
root::

    x^g0  e1  x^g1  e2 ... en  x^gn

where ``e1..en`` is an edge path (tree edges included) from the root back
to the root and ``x^gi`` is a power of the generator of the vertex reached
after ``ei``.  Normal form: for ``i < n``, ``0 <= gi < |a|`` where ``a`` is
the label of ``e(i+1)`` at its departure end, and no pinch ``e x^0 e^-1``
occurs.  This form is unique, so equality of elements is equality of
normal forms.  Pushing ``x^(a k)`` across ``e`` uses ``x_u^(a k) e = e
x_w^(b k)``, which on a non-tree edge is the HNN relation and on a tree
edge the amalgam relation.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    PresentationMismatch,
    RadiusTooLarge,
    UnknownGenerator,
    WordSyntaxError,
    WordTooLong,
)
from .graph import Letter, Presentation

MAX_LETTERS = 10_000
DEFAULT_MAX_RADIUS = 6

GenWord = Sequence[tuple[str, int]]


def _inv(letter: Letter) -> Letter:
    return (letter[0], -letter[1])


class _Path:
    """Mutable normal-form accumulator for a path word."""

    __slots__ = ("info", "start", "exps", "letters", "cap")

    def __init__(self, pres: Presentation, start: str | None = None, cap: int = MAX_LETTERS):
        self.info = pres.graph.letters
        self.start = pres.root if start is None else start
        self.exps = [0]
        self.letters: list[Letter] = []
        self.cap = cap

    @property
    def vertex(self) -> str:
        return self.info[self.letters[-1]][1] if self.letters else self.start

    def power(self, k: int):
        self.exps[-1] += k

    def cross(self, letter: Letter):
        src, _, a, b = self.info[letter]
        if src != self.vertex:
            raise ValueError(f"letter {letter} does not leave vertex {self.vertex}")
        k, r = divmod(self.exps[-1], abs(a))
        if a < 0:
            k = -k
        if r == 0 and self.letters and self.letters[-1] == _inv(letter):
            self.exps.pop()
            self.letters.pop()
            self.exps[-1] += b * k
        else:
            self.exps[-1] = r
            self.letters.append(letter)
            self.exps.append(b * k)
            if len(self.letters) > self.cap:
                raise WordTooLong(f"word exceeds {self.cap} edge letters")

    def extend(self, exps: Sequence[int], letters: Sequence[Letter]):
        self.power(exps[0])
        for letter, k in zip(letters, exps[1:]):
            self.cross(letter)
            self.power(k)

    def walk(self, letters: Iterable[Letter]):
        for letter in letters:
            self.cross(letter)


@dataclass(frozen=True)
class GroupWord:
    """An element of the GBS group, stored in normal form."""

    presentation: Presentation = field(repr=False)
    exps: tuple[int, ...]
    letters: tuple[Letter, ...]

    @classmethod
    def _from_path(cls, pres: Presentation, path: _Path) -> GroupWord:
        if path.vertex != pres.root:
            raise ValueError("path word is not closed at the root")
        return cls(pres, tuple(path.exps), tuple(path.letters))

    @classmethod
    def identity(cls, pres: Presentation) -> GroupWord:
        return cls(pres, (0,), ())

    @classmethod
    def generator(cls, pres: Presentation, symbol: str, k: int = 1) -> GroupWord:
        name = pres.resolve(symbol)
        if name is None:
            raise UnknownGenerator(symbol)
        cache = pres.cache.setdefault("generators", {})
        if (name, k) in cache:
            return cache[name, k]
        path = _Path(pres)
        if name in pres.graph.vertices:
            path.walk(pres.path_from_root(name))
            path.power(k)
            path.walk(pres.path_to_root(name))
            w = cls._from_path(pres, path)
        else:
            e = pres.graph.edge(name)
            path.walk(pres.path_from_root(e.initial))
            path.cross((name, 1))
            path.walk(pres.path_to_root(e.terminal))
            w = cls._from_path(pres, path) ** k
        if len(cache) < 4096:
            cache[name, k] = w
        return w

    @classmethod
    def from_generators(cls, pres: Presentation, word: GenWord) -> GroupWord:
        out = cls.identity(pres)
        for sym, k in word:
            out = out * cls.generator(pres, sym, k)
        return out

    @classmethod
    def from_syllables(cls, pres: Presentation, syllables) -> GroupWord:
        """Reduce a raw path word.

        ``syllables`` mixes ``("x", vertex, k)`` vertex syllables and
        ``("e", edge, +-1)`` edge letters, tracing a closed path at the root.
        """
        path = _Path(pres)
        for kind, name, k in syllables:
            if kind == "x":
                if name != path.vertex:
                    raise ValueError(f"vertex syllable {name!r} off the path (at {path.vertex!r})")
                path.power(k)
            else:
                path.cross((name, k))
        return cls._from_path(pres, path)

    @property
    def syllables(self) -> tuple:
        info = self.presentation.graph.letters
        out = []
        v = self.presentation.root
        for i, k in enumerate(self.exps):
            if k:
                out.append(("x", v, k))
            if i < len(self.letters):
                letter = self.letters[i]
                out.append(("e",) + letter)
                v = info[letter][1]
        return tuple(out)

    def vertices_along(self) -> list[str]:
        """Vertex carrying each exponent ``exps[i]``."""
        info = self.presentation.graph.letters
        vs = [self.presentation.root]
        for letter in self.letters:
            vs.append(info[letter][1])
        return vs

    def is_identity(self) -> bool:
        return not self.letters and self.exps[0] == 0

    def _check(self, other: GroupWord):
        if self.presentation is not other.presentation and self.presentation != other.presentation:
            raise PresentationMismatch("words live over different presentations")

    def __mul__(self, other: GroupWord) -> GroupWord:
        self._check(other)
        path = _Path(self.presentation)
        path.exps = list(self.exps)
        path.letters = list(self.letters)
        path.extend(other.exps, other.letters)
        return GroupWord(self.presentation, tuple(path.exps), tuple(path.letters))

    def inverse(self) -> GroupWord:
        path = _Path(self.presentation)
        exps = [-k for k in reversed(self.exps)]
        letters = [_inv(l) for l in reversed(self.letters)]
        path.extend(exps, letters)
        return GroupWord._from_path(self.presentation, path)

    def __pow__(self, k: int) -> GroupWord:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = GroupWord.identity(self.presentation)
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def generator_word(self) -> list[tuple[str, int]]:
        """The element as a word in vertex generators and stable letters."""
        pres = self.presentation
        tree = pres.tree_edges
        out: list[tuple[str, int]] = []

        def push(sym, k):
            if out and out[-1][0] == sym:
                k += out.pop()[1]
                if k == 0:
                    return
            out.append((sym, k))

        for kind, name, k in self.syllables:
            if kind == "x":
                push(name, k)
            elif name not in tree:
                push(name, k)
        return out

    def __str__(self):
        return format_generator_word(self.generator_word())


def format_generator_word(word: GenWord) -> str:
    if not word:
        return "1"
    return " ".join(s if k == 1 else f"{s}^{k}" for s, k in word)


def reduce(w: GroupWord) -> GroupWord:
    """Normal form of ``w``; GroupWords are always stored reduced, so this re-normalises."""
    path = _Path(w.presentation)
    path.extend(w.exps, w.letters)
    return GroupWord._from_path(w.presentation, path)


def word_equal(u: GroupWord, v: GroupWord) -> bool:
    u._check(v)
    return (u * v.inverse()).is_identity()


def delta_of_word(w: GroupWord) -> Fraction:
    info = w.presentation.graph.letters
    d = Fraction(1)
    for letter in w.letters:
        _, _, dep, arr = info[letter]
        d *= Fraction(arr, dep)
    return d


def is_elliptic(w: GroupWord) -> bool:
    """Whether ``w`` is conjugate into a vertex group (fixes a point of the tree)."""
    info = w.presentation.graph.letters
    letters = list(w.letters)
    if not letters:
        return True
    inner = list(w.exps[1:-1])
    h = w.exps[-1] + w.exps[0]
    while letters:
        if len(letters) < 2 or letters[-1] != _inv(letters[0]):
            return False
        _, _, a, b = info[letters[0]]
        if h % a:
            return False
        k = h // a
        # e-bar x^(ak) e = x^(bk) at the far vertex of e
        letters = letters[1:-1]
        h = inner[-1] + b * k + inner[0] if len(inner) > 1 else inner[0] + b * k
        inner = inner[1:-1]
    return True


def vertex_power(w: GroupWord, vertex: str) -> int | None:
    """``m`` if ``w`` equals ``x_vertex^m``, else None."""
    pres = w.presentation
    path = _Path(pres, start=vertex)
    path.walk(pres.path_to_root(vertex))
    path.extend(w.exps, w.letters)
    path.walk(pres.path_from_root(vertex))
    return None if path.letters else path.exps[0]


def coset_key(w: GroupWord, vertex: str) -> tuple:
    """Canonical key of the tree vertex ``w G_vertex`` (``vertex`` in the fundamental domain)."""
    pres = w.presentation
    path = _Path(pres)
    path.extend(w.exps, w.letters)
    path.walk(pres.path_from_root(vertex))
    return (tuple(path.exps[:-1]), tuple(path.letters))


# --- parsing -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>[+-]?\d+)|(?P<gen>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>[\^()\[\],{}]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _WordParser:
    def __init__(self, text: str, pres: Presentation):
        self.toks = _tokenize(text)
        self.i = 0
        self.pres = pres

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise WordSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def word(self, stop) -> GroupWord:
        out = GroupWord.identity(self.pres)
        while self.peek()[1] not in stop and self.peek()[0] != "end":
            out = out * self.factor()
        return out

    def factor(self) -> GroupWord:
        kind, val, pos = self.peek()
        if kind == "gen":
            self.take()
            name = self.pres.resolve(val)
            if name is None:
                raise UnknownGenerator(val, pos)
            k = self.exponent()
            return GroupWord.generator(self.pres, name, k)
        if kind == "int" and val == "1":
            self.take()
            self.exponent()
            return GroupWord.identity(self.pres)
        if val == "(":
            self.take()
            atom = self.word({")"})
            self.take(")")
        elif val == "[":
            self.take()
            a = self.word({","})
            self.take(",")
            b = self.word({"]"})
            self.take("]")
            atom = a * b * a.inverse() * b.inverse()
        else:
            raise WordSyntaxError(f"unexpected token {val!r}", pos)
        return atom ** self.exponent()

    def exponent(self) -> int:
        if self.peek()[1] != "^":
            return 1
        self.take("^")
        braced = self.peek()[1] == "{"
        if braced:
            self.take("{")
        kind, val, pos = self.take()
        if kind != "int":
            raise WordSyntaxError("exponent must be an integer", pos)
        if braced:
            self.take("}")
        return int(val)


def parse_word(text: str, pres: Presentation) -> GroupWord:
    """Parse ``gen``, ``gen^k``, ``(w)^k``, ``[a,b]`` (= a b a^-1 b^-1) and ``1``."""
    p = _WordParser(text, pres)
    w = p.word(set())
    kind, val, pos = p.peek()
    if kind != "end":
        raise WordSyntaxError(f"unexpected token {val!r}", pos)
    return w


# --- tree balls ----------------------------------------------------------


def max_radius() -> int:
    env = os.environ.get("GBSFIX_MAX_RADIUS")
    return int(env) if env else DEFAULT_MAX_RADIUS


@dataclass(frozen=True)
class BallVertex:
    key: tuple
    word: GroupWord
    vertex: str
    depth: int

    @property
    def name(self) -> str:
        return f"{self.word} G_{self.vertex}"


@dataclass(frozen=True)
class TreeBall:
    """Vertices ``w G_v`` at distance <= radius from the base, as a tree."""

    radius: int
    base: str
    vertices: tuple[BallVertex, ...]
    edges: tuple[tuple[int, int], ...]

    def neighbours(self, i: int) -> list[int]:
        return [b if a == i else a for a, b in self.edges if i in (a, b)]

    def degree(self, i: int) -> int:
        return len(self.neighbours(i))

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for v in self.vertices:
            lines.append(f'  "{v.name}";')
        for a, b in self.edges:
            lines.append(f'  "{self.vertices[a].name}" -- "{self.vertices[b].name}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _key_word(pres: Presentation, key) -> tuple[GroupWord, str]:
    exps, letters = key
    path = _Path(pres)
    path.extend(list(exps) + [0], letters)
    v = path.vertex
    path.walk(pres.path_to_root(v))
    return GroupWord._from_path(pres, path), v


def coset_neighbours(pres: Presentation, key) -> list[tuple]:
    """Keys of all tree vertices adjacent to ``key``, in deterministic order."""
    exps, letters = key
    info = pres.graph.letters
    v = info[letters[-1]][1] if letters else pres.root
    out = []
    for letter in pres.graph.departing[v]:
        a = info[letter][2]
        for r in range(abs(a)):
            path = _Path(pres)
            path.extend(list(exps) + [r], letters)
            path.cross(letter)
            out.append((tuple(path.exps[:-1]), tuple(path.letters)))
    return out


def tree_ball(pres: Presentation, base: str | None = None, radius: int = 1) -> TreeBall:
    if base is None:
        base = pres.root
    cap = max_radius()
    if radius > cap:
        raise RadiusTooLarge(f"radius {radius} exceeds the cap {cap} (GBSFIX_MAX_RADIUS)")
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    base_key = ((0,) * len(pres.path_from_root(base)), pres.path_from_root(base))
    index = {base_key: 0}
    order = [(base_key, 0)]
    edges = []
    i = 0
    while i < len(order):
        key, depth = order[i]
        if depth < radius:
            for nk in coset_neighbours(pres, key):
                if nk not in index:
                    index[nk] = len(order)
                    order.append((nk, depth + 1))
                    edges.append((i, index[nk]))
        i += 1
    verts = []
    for key, depth in order:
        w, v = _key_word(pres, key)
        verts.append(BallVertex(key, w, v, depth))
    return TreeBall(radius, base, tuple(verts), tuple(edges))
