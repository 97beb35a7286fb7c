"""The ``.gbs`` text format.

::

    # BS(2,3)
    vertex x
    loop t: x[2] -- x[3]
    root x
    auto twist {
      t -> t x^2
      inverse {
        t -> t x^-2
      }
    }

``edge`` joins two distinct vertices; a self-edge must be written with
``loop``.  For ``loop t: v[p] -- v[q]`` the relator is ``v^p = t v^q t^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .autos import Automorphism, GeneratorMap, check_automorphism
from .errors import DuplicateId, InputError
from .graph import Edge, LabelledGraph, Presentation, derive_presentation


class GbsSyntaxError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class EdgeDecl:
    id: str
    initial: str
    label_initial: int
    terminal: str
    label_terminal: int
    loop: bool


@dataclass(frozen=True)
class AutoDecl:
    name: str
    images: tuple[tuple[str, str], ...]
    inverse: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class GbsDocument:
    vertices: tuple[str, ...]
    edges: tuple[EdgeDecl, ...]
    root: str | None = None
    autos: tuple[AutoDecl, ...] = ()

    def to_graph(self) -> LabelledGraph:
        return LabelledGraph(
            self.vertices,
            tuple(Edge(e.id, e.initial, e.terminal, e.label_initial, e.label_terminal) for e in self.edges),
        )

    def presentation(self, root: str | None = None) -> Presentation:
        return derive_presentation(self.to_graph(), root or self.root)

    def auto(self, name: str) -> AutoDecl:
        for a in self.autos:
            if a.name == name:
                return a
        raise InputError(f"no automorphism named {name!r}")

    def automorphism(self, name: str, pres: Presentation | None = None) -> Automorphism:
        pres = pres or self.presentation()
        a = self.auto(name)
        return check_automorphism(GeneratorMap.build(pres, dict(a.images), dict(a.inverse)))


ID = r"[A-Za-z_][A-Za-z0-9_']*"
INT = r"[+-]?\d+"
_EDGE = re.compile(
    rf"(?P<kw>edge|loop)\s+(?P<id>{ID})\s*:\s*(?P<u>{ID})\s*\[\s*(?P<a>{INT})\s*\]\s*--\s*"
    rf"(?P<w>{ID})\s*\[\s*(?P<b>{INT})\s*\]\s*$"
)
_SIMPLE = re.compile(rf"(?P<kw>vertex|root)\s+(?P<id>{ID})\s*$")
_AUTO = re.compile(rf"auto\s+(?P<id>{ID})\s*\{{\s*$")
_INVERSE = re.compile(r"inverse\s*\{\s*$")
_IMAGE = re.compile(rf"(?P<gen>{ID})\s*->\s*(?P<word>\S.*?)\s*$")


def _strip(line: str) -> tuple[str, int]:
    """Drop the comment and leading blanks; return the text and its 1-based start column."""
    line = line.split("#", 1)[0].rstrip()
    body = line.lstrip()
    return body, len(line) - len(body) + 1


def _edge_error(body: str, col: int, lineno: int) -> GbsSyntaxError:
    # point at the first piece that stops matching
    pieces = [
        (rf"(edge|loop)\s+", "expected 'edge' or 'loop'"),
        (rf"{ID}\s*", "expected an edge id"),
        (r":\s*", "expected ':'"),
        (rf"{ID}\s*", "expected a vertex id"),
        (rf"\[\s*{INT}\s*\]\s*", "expected '[INT]' label"),
        (r"--\s*", "expected '--'"),
        (rf"{ID}\s*", "expected a vertex id"),
        (rf"\[\s*{INT}\s*\]\s*", "expected '[INT]' label"),
        (r"$", "unexpected trailing text"),
    ]
    pos = 0
    for pat, msg in pieces:
        m = re.compile(pat).match(body, pos)
        if not m:
            return GbsSyntaxError(msg, lineno, col + pos)
        pos = m.end()
    return GbsSyntaxError("malformed edge", lineno, col)


def parse_gbs(text: str) -> GbsDocument:
    text = text.removeprefix("\ufeff")
    vertices: list[str] = []
    edges: list[EdgeDecl] = []
    autos: list[AutoDecl] = []
    root = None
    seen: dict[str, int] = {}
    lines = text.splitlines()
    i = 0

    def claim(ident, lineno, col):
        if ident in seen:
            raise DuplicateId(ident, lineno, seen[ident])
        seen[ident] = lineno

    while i < len(lines):
        lineno = i + 1
        body, col = _strip(lines[i])
        i += 1
        if not body:
            continue
        word = body.split(None, 1)[0]
        if word in ("vertex", "root"):
            m = _SIMPLE.match(body)
            if not m:
                raise GbsSyntaxError(f"expected '{word} ID'", lineno, col + len(word) + 1)
            if word == "vertex":
                claim(m["id"], lineno, col)
                vertices.append(m["id"])
            else:
                if root is not None:
                    raise GbsSyntaxError("root declared twice", lineno, col)
                root = m["id"]
        elif word in ("edge", "loop"):
            m = _EDGE.match(body)
            if not m:
                raise _edge_error(body, col, lineno)
            u, w = m["u"], m["w"]
            if m["kw"] == "edge" and u == w:
                raise GbsSyntaxError(
                    f"edge {m['id']!r} joins {u!r} to itself; write it as 'loop'", lineno, col
                )
            if m["kw"] == "loop" and u != w:
                raise GbsSyntaxError(
                    f"loop {m['id']!r} must start and end at one vertex", lineno, col + m.start("w")
                )
            claim(m["id"], lineno, col)
            edges.append(EdgeDecl(m["id"], u, int(m["a"]), w, int(m["b"]), m["kw"] == "loop"))
        elif word == "auto":
            m = _AUTO.match(body)
            if not m:
                raise GbsSyntaxError("expected 'auto NAME {'", lineno, col)
            if any(a.name == m["id"] for a in autos):
                raise DuplicateId(m["id"], lineno)
            decl, i = _parse_auto(m["id"], lines, i, lineno)
            autos.append(decl)
        else:
            raise GbsSyntaxError(f"unknown directive {word!r}", lineno, col)
    if not vertices:
        raise GbsSyntaxError("no vertices declared", 1, 1)
    return GbsDocument(tuple(vertices), tuple(edges), root, tuple(autos))


def _parse_auto(name, lines, i, start):
    images: list[tuple[str, str]] = []
    inverse: list[tuple[str, str]] | None = None
    target = images
    depth = 1
    while i < len(lines):
        lineno = i + 1
        body, col = _strip(lines[i])
        i += 1
        if not body:
            continue
        if body == "}":
            depth -= 1
            if depth == 0:
                if inverse is None:
                    raise GbsSyntaxError(f"auto {name!r} has no inverse block", lineno, col)
                return AutoDecl(name, tuple(images), tuple(inverse)), i
            target = images
            continue
        if _INVERSE.match(body):
            if depth != 1 or inverse is not None:
                raise GbsSyntaxError("unexpected inverse block", lineno, col)
            inverse = []
            target = inverse
            depth = 2
            continue
        m = _IMAGE.match(body)
        if not m:
            raise GbsSyntaxError("expected 'GEN -> WORD'", lineno, col)
        if any(g == m["gen"] for g, _ in target):
            raise GbsSyntaxError(f"generator {m['gen']!r} mapped twice", lineno, col)
        target.append((m["gen"], m["word"]))
    raise GbsSyntaxError(f"auto {name!r} is not closed", start, 1)


def print_gbs(doc: GbsDocument) -> str:
    out = [f"vertex {v}" for v in doc.vertices]
    for e in doc.edges:
        kw = "loop" if e.loop else "edge"
        out.append(f"{kw} {e.id}: {e.initial}[{e.label_initial}] -- {e.terminal}[{e.label_terminal}]")
    if doc.root is not None:
        out.append(f"root {doc.root}")
    for a in doc.autos:
        out.append(f"auto {a.name} {{")
        out.extend(f"  {g} -> {w}" for g, w in a.images)
        out.append("  inverse {")
        out.extend(f"    {g} -> {w}" for g, w in a.inverse)
        out.append("  }")
        out.append("}")
    return "\n".join(out) + "\n"


def document_from_graph(g: LabelledGraph, root: str | None = None) -> GbsDocument:
    return GbsDocument(
        g.vertices,
        tuple(
            EdgeDecl(e.id, e.initial, e.label_initial, e.terminal, e.label_terminal, e.is_loop)
            for e in g.edges
        ),
        root,
    )


def load(path) -> GbsDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_gbs(fh.read())
