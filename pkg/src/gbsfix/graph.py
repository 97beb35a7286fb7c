"""Z-labelled graphs (GBS systems) and the presentations they induce.

A graph of infinite cyclic groups is recorded by its underlying finite
graph together with one nonzero integer per edge end: the index of the
edge group in the adjacent vertex group, with sign.  For an edge ``e``
from ``u`` to ``w`` with labels ``a`` (at ``u``) and ``b`` (at ``w``)
the induced presentation contains

* ``u^a = w^b`` if ``e`` lies in the spanning tree,
* ``e w^b e^-1 = u^a`` otherwise, with ``e`` a stable letter.

So ``loop t: v[2] -- v[3]`` is literally ``BS(2,3) = <v, t | v^2 = t v^3 t^-1>``.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    DanglingEdge,
    Disconnected,
    DuplicateId,
    EmptyGraph,
    NotCollapsible,
    UnknownRoot,
    ZeroLabel,
)

# An oriented traversal of an edge: (edge id, +1 forwards / -1 backwards).
Letter = tuple[str, int]


@dataclass(frozen=True)
class Edge:
    id: str
    initial: str
    terminal: str
    label_initial: int
    label_terminal: int

    @property
    def is_loop(self) -> bool:
        return self.initial == self.terminal

    def reversed(self) -> Edge:
        return Edge(self.id, self.terminal, self.initial, self.label_terminal, self.label_initial)


@dataclass(frozen=True)
class LabelledGraph:
    """A validated GBS system.  Vertices and edges are kept sorted by id."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))
        _check(self.vertices, self.edges)

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def edge(self, edge_id: str) -> Edge:
        return self.edge_map[edge_id]

    @cached_property
    def letters(self) -> dict[Letter, tuple[str, str, int, int]]:
        """(source, target, departure label, arrival label) per oriented edge."""
        info = {}
        for e in self.edges:
            info[(e.id, 1)] = (e.initial, e.terminal, e.label_initial, e.label_terminal)
            info[(e.id, -1)] = (e.terminal, e.initial, e.label_terminal, e.label_initial)
        return info

    @cached_property
    def departing(self) -> dict[str, tuple[Letter, ...]]:
        """Oriented edges leaving each vertex, ordered by (edge id, direction)."""
        out: dict[str, list[Letter]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.initial].append((e.id, 1))
            out[e.terminal].append((e.id, -1))
        return {v: tuple(sorted(ls, key=lambda l: (l[0], -l[1]))) for v, ls in out.items()}

    @property
    def betti(self) -> int:
        return betti(self)

    def labels(self) -> Iterable[tuple[str, int]]:
        for e in self.edges:
            yield e.id, e.label_initial
            yield e.id, e.label_terminal

    def relabel(self, vertex_map: Mapping[str, str], edge_map: Mapping[str, str] | None = None) -> LabelledGraph:
        edge_map = edge_map or {}
        return LabelledGraph(
            tuple(vertex_map.get(v, v) for v in self.vertices),
            tuple(
                Edge(
                    edge_map.get(e.id, e.id),
                    vertex_map.get(e.initial, e.initial),
                    vertex_map.get(e.terminal, e.terminal),
                    e.label_initial,
                    e.label_terminal,
                )
                for e in self.edges
            ),
        )

    def reverse_edge(self, edge_id: str) -> LabelledGraph:
        return LabelledGraph(
            self.vertices,
            tuple(e.reversed() if e.id == edge_id else e for e in self.edges),
        )


def _check(vertices, edges):
    if not vertices:
        raise EmptyGraph("graph has no vertices")
    seen = set()
    for ident in list(vertices) + [e.id for e in edges]:
        if ident in seen:
            raise DuplicateId(ident)
        seen.add(ident)
    vset = set(vertices)
    for e in edges:
        for v in (e.initial, e.terminal):
            if v not in vset:
                raise DanglingEdge(e.id, v)
        if e.label_initial == 0:
            raise ZeroLabel(e.id, "initial")
        if e.label_terminal == 0:
            raise ZeroLabel(e.id, "terminal")
    adj: dict[str, set[str]] = {v: set() for v in vertices}
    for e in edges:
        adj[e.initial].add(e.terminal)
        adj[e.terminal].add(e.initial)
    reached = {vertices[0]}
    todo = [vertices[0]]
    while todo:
        for w in adj[todo.pop()]:
            if w not in reached:
                reached.add(w)
                todo.append(w)
    if len(reached) != len(vertices):
        raise Disconnected(vset - reached)


def validate(raw) -> LabelledGraph:
    """Build a graph from a raw description.

    ``raw`` is a mapping with ``"vertices"`` (ids) and ``"edges"``, each
    edge either an :class:`Edge` or a sequence
    ``(id, initial, terminal, label_initial, label_terminal)``.
    """
    if isinstance(raw, LabelledGraph):
        return raw
    vertices = tuple(str(v) for v in raw.get("vertices", ()))
    edges = []
    for e in raw.get("edges", ()):
        if not isinstance(e, Edge):
            eid, u, w, a, b = e
            e = Edge(str(eid), str(u), str(w), int(a), int(b))
        edges.append(e)
    return LabelledGraph(vertices, tuple(edges))


def bs_graph(p: int, q: int, vertex: str = "x", letter: str = "t") -> LabelledGraph:
    """One vertex, one loop: the presentation is BS(p, q) = <x, t | x^p = t x^q t^-1>."""
    return LabelledGraph((vertex,), (Edge(letter, vertex, vertex, p, q),))


def betti(g: LabelledGraph) -> int:
    return 1 - len(g.vertices) + len(g.edges)


def is_one_free(g: LabelledGraph) -> bool:
    return all(abs(label) != 1 for _, label in g.labels())


class ElementaryType(enum.Enum):
    Z = "Z"
    Z2 = "Z2"
    KLEIN = "Klein"


def collapsible_edges(g: LabelledGraph) -> list[str]:
    return [
        e.id
        for e in g.edges
        if not e.is_loop and (abs(e.label_initial) == 1 or abs(e.label_terminal) == 1)
    ]


def collapse_move(g: LabelledGraph, edge_id: str) -> LabelledGraph:
    """Contract a non-loop edge carrying a +-1 label.

    With label ``eps = +-1`` at the removed vertex ``u`` and ``b`` at the
    survivor ``w``, the tree relation reads ``u = w^(eps*b)``; every other
    label at ``u`` is multiplied by ``eps*b``.  If both labels are +-1 the
    initial vertex is removed.
    """
    if edge_id not in g.edge_map:
        raise NotCollapsible(f"no edge {edge_id!r}")
    e = g.edge(edge_id)
    if e.is_loop:
        raise NotCollapsible(f"edge {edge_id!r} is a loop")
    if abs(e.label_initial) == 1:
        removed, survivor, factor = e.initial, e.terminal, e.label_initial * e.label_terminal
    elif abs(e.label_terminal) == 1:
        removed, survivor, factor = e.terminal, e.initial, e.label_terminal * e.label_initial
    else:
        raise NotCollapsible(f"edge {edge_id!r} carries no +-1 label")
    edges = []
    for f in g.edges:
        if f.id == edge_id:
            continue
        a, b = f.label_initial, f.label_terminal
        u, w = f.initial, f.terminal
        if u == removed:
            u, a = survivor, a * factor
        if w == removed:
            w, b = survivor, b * factor
        edges.append(Edge(f.id, u, w, a, b))
    return LabelledGraph(tuple(v for v in g.vertices if v != removed), tuple(edges))


def reduce_graph(g: LabelledGraph) -> LabelledGraph:
    """Apply collapse moves (lowest edge id first) until none applies."""
    while True:
        todo = collapsible_edges(g)
        if not todo:
            return g
        g = collapse_move(g, todo[0])


def is_elementary(g: LabelledGraph) -> ElementaryType | None:
    """Return which elementary group ``g`` presents, or None if non-elementary.

    Only the reduced forms reachable by collapse moves are recognised.
    """
    r = reduce_graph(g)
    if len(r.vertices) == 1 and not r.edges:
        return ElementaryType.Z
    if len(r.edges) == 1:
        e = r.edges[0]
        a, b = e.label_initial, e.label_terminal
        if e.is_loop and abs(a) == 1 and abs(b) == 1:
            return ElementaryType.Z2 if a * b == 1 else ElementaryType.KLEIN
        if not e.is_loop and abs(a) == 2 and abs(b) == 2:
            return ElementaryType.KLEIN
    return None


@dataclass(frozen=True)
class Presentation:
    """The presentation of a GBS system relative to a BFS spanning tree.

    Vertex generators are named by their vertex ids and stable letters by
    their edge ids.  Relators are generator words (sequences of
    ``(symbol, exponent)``) equal to the identity.
    """

    graph: LabelledGraph
    root: str

    @cached_property
    def tree_edges(self) -> frozenset[str]:
        return frozenset(self._tree[0])

    @cached_property
    def _tree(self):
        g = self.graph
        tree: list[str] = []
        paths: dict[str, tuple[Letter, ...]] = {self.root: ()}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for letter in g.departing[u]:
                src, dst, _, _ = g.letters[letter]
                if dst not in paths and letter[0] not in tree:
                    tree.append(letter[0])
                    paths[dst] = paths[u] + (letter,)
                    queue.append(dst)
        return tree, paths

    @cached_property
    def cache(self) -> dict:
        """Scratch space for data derived from the presentation (generator images)."""
        return {}

    def path_from_root(self, v: str) -> tuple[Letter, ...]:
        return self._tree[1][v]

    def path_to_root(self, v: str) -> tuple[Letter, ...]:
        return tuple((eid, -d) for eid, d in reversed(self._tree[1][v]))

    @property
    def vertex_generators(self) -> tuple[str, ...]:
        return self.graph.vertices

    @cached_property
    def stable_letters(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.graph.edges if e.id not in self.tree_edges)

    @property
    def generators(self) -> tuple[str, ...]:
        return self.vertex_generators + self.stable_letters

    def is_stable_letter(self, symbol: str) -> bool:
        return symbol in self.stable_letters

    @cached_property
    def relators(self) -> tuple[tuple[tuple[str, int], ...], ...]:
        rels = []
        for e in self.graph.edges:
            u, w, a, b = e.initial, e.terminal, e.label_initial, e.label_terminal
            if e.id in self.tree_edges:
                rels.append(((u, a), (w, -b)))
            else:
                rels.append(((e.id, 1), (w, b), (e.id, -1), (u, -a)))
        return tuple(rels)

    def resolve(self, symbol: str) -> str | None:
        """Map a generator token to its canonical symbol (``x_v`` aliases ``v``)."""
        if symbol in self.graph.vertices or symbol in self.stable_letters:
            return symbol
        if symbol.startswith("x_") and symbol[2:] in self.graph.vertices:
            return symbol[2:]
        if symbol.startswith("t_") and symbol[2:] in self.stable_letters:
            return symbol[2:]
        return None


def default_root(g: LabelledGraph) -> str:
    return g.vertices[0]


def derive_presentation(g: LabelledGraph, root: str | None = None) -> Presentation:
    if root is None:
        root = default_root(g)
    if root not in g.vertices:
        raise UnknownRoot(root)
    return Presentation(g, root)


def format_relator(rel) -> str:
    return " ".join(s if k == 1 else f"{s}^{k}" for s, k in rel)
