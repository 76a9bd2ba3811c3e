"""Finite truncations of Sierpinski lattices.

A lattice is generated by an infinite word over ``{0,1,2}``.  The level-``n``
truncation at sparsity ``k`` is the image of ``V_{n-k}`` under
``F_{w1}^{-1} ... F_{wn}^{-1}``; its cells have side ``2**k``.  Vertices are
addressed by exact planar coordinates, so shared cell corners merge without
any floating-point hashing.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Optional

INTERIOR = "interior"
BOUNDARY = "boundary"
RIM = "rim"

# q_i as (x, y / sqrt(3))
_Q = (
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(0), Fraction(0)),
    (Fraction(1), Fraction(0)),
)


class InsufficientWordError(ValueError):
    pass


class UndecidableBoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class WordSpec:
    """Generator of an infinite word ``w1 w2 ...`` over ``{0,1,2}``.

    ``tail_kind`` is ``"const"``, ``"periodic"`` or ``"none"``; for ``"const"``
    the tail string is the single repeated digit.
    """

    prefix: str = ""
    tail_kind: str = "none"
    tail: str = ""

    def __post_init__(self):
        if any(c not in "012" for c in self.prefix + self.tail):
            raise ValueError("word digits must be in {0,1,2}")
        if self.tail_kind not in ("const", "periodic", "none"):
            raise ValueError(f"unknown tail kind {self.tail_kind!r}")
        if self.tail_kind == "const" and len(self.tail) != 1:
            raise ValueError("constant tail needs exactly one digit")
        if self.tail_kind == "periodic" and not self.tail:
            raise ValueError("periodic tail must be nonempty")
        if self.tail_kind == "none" and self.tail:
            raise ValueError("tail=none takes no digits")

    @classmethod
    def const(cls, d: int, prefix: str = "") -> "WordSpec":
        return cls(prefix, "const", str(d))

    @classmethod
    def periodic(cls, pattern: str, prefix: str = "") -> "WordSpec":
        return cls(prefix, "periodic", pattern)

    @classmethod
    def parse(cls, text: str) -> "WordSpec":
        """Parse ``prefix=<digits>;tail=const:<d>|periodic:<digits>|none``."""
        prefix, kind, tail = "", "none", ""
        for part in filter(None, (p.strip() for p in text.split(";"))):
            key, _, value = part.partition("=")
            key = key.strip()
            value = value.strip()
            if key == "prefix":
                prefix = value
            elif key == "tail":
                m = re.fullmatch(r"(const|periodic):([012]+)|none", value)
                if not m:
                    raise ValueError(f"bad tail {value!r}")
                if value != "none":
                    kind, tail = m.group(1), m.group(2)
            else:
                raise ValueError(f"unknown word field {key!r}")
        return cls(prefix, kind, tail)

    def __str__(self):
        tail = "none" if self.tail_kind == "none" else f"{self.tail_kind}:{self.tail}"
        return f"prefix={self.prefix};tail={tail}" if self.prefix else f"tail={tail}"

    def digit(self, m: int) -> int:
        """The ``m``-th digit, 1-based."""
        if m < 1:
            raise IndexError("digits are 1-based")
        if m <= len(self.prefix):
            return int(self.prefix[m - 1])
        if self.tail_kind == "none":
            raise InsufficientWordError("insufficient word")
        j = m - len(self.prefix) - 1
        return int(self.tail[j % len(self.tail)])

    def digits(self, n: int) -> tuple[int, ...]:
        if self.tail_kind == "none" and n > len(self.prefix):
            raise InsufficientWordError("insufficient word")
        return tuple(self.digit(m) for m in range(1, n + 1))

    def eventual_digit(self) -> Optional[int]:
        """The repeated digit if the word is eventually constant, else None."""
        if self.tail_kind == "none":
            raise UndecidableBoundaryError("undecidable on finite prefix")
        if len(set(self.tail)) == 1:
            return int(self.tail[0])
        return None


@dataclass(frozen=True)
class VertexId:
    """The planar point ``(px / 2**scale, py * sqrt(3) / 2**scale)``.

    Instances are kept in reduced form so equality of ids is equality of
    points; use :meth:`of` or :meth:`from_point` to construct.
    """

    px: int
    py: int
    scale: int

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")
        if self.scale > 0 and self.px % 2 == 0 and self.py % 2 == 0:
            raise ValueError("VertexId not in reduced form; use VertexId.of")

    @classmethod
    def of(cls, px: int, py: int, scale: int) -> "VertexId":
        while scale > 0 and px % 2 == 0 and py % 2 == 0:
            px, py, scale = px // 2, py // 2, scale - 1
        return cls(px, py, scale)

    @classmethod
    def from_point(cls, x: Fraction, y: Fraction) -> "VertexId":
        """``x`` is the abscissa, ``y`` the ordinate divided by sqrt(3)."""
        den = math.lcm(x.denominator, y.denominator)
        scale = den.bit_length() - 1
        if den != 1 << scale:
            raise ValueError("lattice coordinates have power-of-two denominators")
        return cls.of(int(x * den), int(y * den), scale)

    def point(self) -> tuple[Fraction, Fraction]:
        d = 1 << self.scale
        return Fraction(self.px, d), Fraction(self.py, d)

    def xy(self) -> tuple[float, float]:
        x, y = self.point()
        return float(x), float(y) * math.sqrt(3)

    def triple(self) -> tuple[int, int, int]:
        return (self.px, self.py, self.scale)


def _vid(p) -> VertexId:
    return VertexId.from_point(*p)


def _mid(p, q):
    return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def _inv_map(i: int, p):
    """``F_i^{-1}(p) = 2p - q_i``."""
    q = _Q[i]
    return (2 * p[0] - q[0], 2 * p[1] - q[1])


def blow_up(word_digits: Iterable[int], p):
    """Apply ``F_{w1}^{-1} ... F_{wm}^{-1}`` to the point ``p``."""
    for i in reversed(tuple(word_digits)):
        p = _inv_map(i, p)
    return p


def _fwd_map(i: int, p):
    q = _Q[i]
    return ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def address(word: WordSpec, m: int, i: int, inner: Iterable[int] = ()) -> VertexId:
    """The vertex ``F_{w1}^{-1}..F_{wm}^{-1} F_{l1}..F_{lj} (q_i)``."""
    p = _Q[i]
    for li in reversed(tuple(inner)):
        p = _fwd_map(li, p)
    return _vid(blow_up(word.digits(m), p))


def subcell(corners, i: int):
    """Corners of the ``i``-th subcell; corner ``j`` is the image of ``q_j``."""
    return tuple(corners[i] if j == i else _mid(corners[i], corners[j]) for j in range(3))


@dataclass(frozen=True)
class LatticeGraph:
    """A finite graph cut from a Sierpinski lattice.

    ``cells`` lists vertex triples ordered as images of ``(q0, q1, q2)``;
    edges are exactly the cell sides.  ``flags`` marks each vertex as
    interior, the lattice boundary vertex, or a truncation-rim artifact.
    """

    word: Optional[WordSpec]
    level: int
    sparsity: int
    vertices: tuple[VertexId, ...]
    adjacency: dict
    flags: dict
    cells: tuple
    corners: tuple
    boundary: Optional[VertexId] = None
    labels: dict = field(default_factory=dict)

    def __contains__(self, v) -> bool:
        return v in self.adjacency

    def __len__(self) -> int:
        return len(self.vertices)

    def neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise KeyError(f"{v} is not a vertex of this graph") from None

    def degree(self, v: VertexId) -> int:
        return len(self.neighbors(v))

    def flag(self, v: VertexId) -> str:
        return self.flags[v]

    def is_rim(self, v: VertexId) -> bool:
        return self.flags[v] == RIM

    def mu(self, v: VertexId) -> Fraction:
        return Fraction(1, 2) if self.flags[v] == BOUNDARY else Fraction(1)

    @property
    def edges(self) -> list[tuple[VertexId, VertexId]]:
        index = self.index
        return sorted(
            {(u, v) if index[u] < index[v] else (v, u) for u in self.vertices for v in self.adjacency[u]},
            key=lambda e: (index[e[0]], index[e[1]]),
        )

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def interior(self) -> list[VertexId]:
        return [v for v in self.vertices if self.flags[v] == INTERIOR]

    def non_rim(self) -> list[VertexId]:
        return [v for v in self.vertices if self.flags[v] != RIM]

    def __getitem__(self, label: str) -> VertexId:
        return self.labels[label]

    def iter_cells(self) -> Iterator[tuple]:
        return iter(self.cells)


def _graph_from_cells(cells, corners, word, level, sparsity, boundary, labels=None, rim=None):
    adjacency: dict = {}
    for cell in cells:
        for a in cell:
            adjacency.setdefault(a, set())
        for a, b in ((0, 1), (1, 2), (0, 2)):
            adjacency[cell[a]].add(cell[b])
            adjacency[cell[b]].add(cell[a])
    key = VertexId.point
    vertices = tuple(sorted(adjacency, key=key))
    adjacency = {v: tuple(sorted(adjacency[v], key=key)) for v in vertices}
    rim = set(corners) if rim is None else set(rim)
    flags = {}
    for v in vertices:
        if v == boundary:
            flags[v] = BOUNDARY
        elif v in rim:
            flags[v] = RIM
        else:
            flags[v] = INTERIOR
    return LatticeGraph(
        word=word,
        level=level,
        sparsity=sparsity,
        vertices=vertices,
        adjacency=adjacency,
        flags=flags,
        cells=tuple(cells),
        corners=tuple(corners),
        boundary=boundary if boundary in adjacency else None,
        labels=dict(labels or {}),
    )


def _boundary_or_none(word: WordSpec) -> Optional[VertexId]:
    try:
        return detect_boundary(word)
    except UndecidableBoundaryError:
        return None


def cell_corners(word: WordSpec, n: int, k: int = 0) -> list[tuple]:
    """Point triples of the level-``(n-k)`` cells of the truncation, in
    lexicographic order of the cell address (outermost digit first)."""
    big = tuple(blow_up(word.digits(n), q) for q in _Q)
    cells = [big]
    for _ in range(n - k):
        cells = [subcell(c, i) for c in cells for i in range(3)]
    return cells


def build_truncation(word: WordSpec, n: int, k: int = 0) -> LatticeGraph:
    """The level-``n`` truncation of the lattice at sparsity ``k``."""
    if not n >= k >= 0:
        raise ValueError("need n >= k >= 0")
    cells = [tuple(_vid(p) for p in c) for c in cell_corners(word, n, k)]
    big = tuple(_vid(blow_up(word.digits(n), q)) for q in _Q)
    boundary = _boundary_or_none(word)
    return _graph_from_cells(cells, big, word, n, k, boundary)


def detect_boundary(word: WordSpec) -> Optional[VertexId]:
    """The degree-2 vertex of the lattice, or None when there is none."""
    d = word.eventual_digit()
    if d is None:
        return None
    return _vid(blow_up((int(c) for c in word.prefix), _Q[d]))


def neighbors(v: VertexId, g: LatticeGraph) -> set[VertexId]:
    return set(g.neighbors(v))


GAMMA_NAMES = ("x1", "x2", "x3", "x4", "y0", "y1", "y2", "y3", "y4", "y5", "y6")
GAMMA_Y = GAMMA_NAMES[4:]
GAMMA_X = GAMMA_NAMES[:4]


def _gamma_points() -> dict:
    F = Fraction
    return {
        "x1": (F(0), F(0)),
        "x2": (F(4), F(0)),
        "x3": (F(3), F(1)),
        "x4": (F(1), F(1)),
        "y0": (F(2), F(0)),
    }


def gamma_coarse_cells() -> list[tuple[str, str, str]]:
    """The two coarse cells of the graph Gamma, as (top, left, right) names."""
    return [("x4", "x1", "y0"), ("x3", "y0", "x2")]


def build_gamma() -> LatticeGraph:
    """The 11-vertex graph Gamma: two subdivided cells sharing ``y0``.

    Coarse vertices ``x1..x4`` are flagged rim (the Dirichlet boundary);
    vertex names are available through ``g.labels``.
    """
    pts = _gamma_points()
    mids = {
        "y1": ("x1", "y0"),
        "y5": ("x1", "x4"),
        "y4": ("y0", "x4"),
        "y2": ("y0", "x2"),
        "y6": ("x2", "x3"),
        "y3": ("y0", "x3"),
    }
    for name, (a, b) in mids.items():
        pts[name] = _mid(pts[a], pts[b])
    labels = {name: _vid(p) for name, p in pts.items()}
    cells = []
    for coarse in gamma_coarse_cells():
        corners = tuple(pts[c] for c in coarse)
        for i in range(3):
            cells.append(tuple(_vid(p) for p in subcell(corners, i)))
    rim = [labels[x] for x in GAMMA_X]
    g = _graph_from_cells(cells, rim, None, 1, 0, None, labels=labels, rim=rim)
    return g


def build_gamma_coarse() -> LatticeGraph:
    """The coarse neighbourhood of ``y0``: vertices ``x1..x4, y0``."""
    pts = _gamma_points()
    labels = {name: _vid(p) for name, p in pts.items()}
    cells = [tuple(labels[c] for c in cell) for cell in gamma_coarse_cells()]
    rim = [labels[x] for x in GAMMA_X]
    return _graph_from_cells(cells, rim, None, 1, 1, None, labels=labels, rim=rim)


def coarse_cells(g: LatticeGraph) -> list[tuple]:
    """Cells of the next coarser graph that ``g`` subdivides (as VertexIds)."""
    if g.labels and g.word is None:
        return [tuple(g.labels[c] for c in cell) for cell in gamma_coarse_cells()]
    if g.sparsity >= g.level:
        raise ValueError("graph is a single cell; no coarser graph")
    return [tuple(_vid(p) for p in c) for c in cell_corners(g.word, g.level, g.sparsity + 1)]


# -- export -----------------------------------------------------------------


def graph_to_dict(g: LatticeGraph) -> dict:
    index = g.index
    return {
        "word": None if g.word is None else str(g.word),
        "level": g.level,
        "sparsity": g.sparsity,
        "vertices": [list(v.triple()) for v in g.vertices],
        "flags": [g.flags[v] for v in g.vertices],
        "edges": [[index[a], index[b]] for a, b in g.edges],
        "cells": [[index[v] for v in c] for c in g.cells],
        "corners": [index[v] for v in g.corners],
        "boundary": None if g.boundary is None else index[g.boundary],
        "labels": {k: index[v] for k, v in g.labels.items()},
    }


def graph_from_dict(data: dict) -> LatticeGraph:
    verts = [VertexId(*t) for t in data["vertices"]]
    cells = [tuple(verts[i] for i in c) for c in data["cells"]]
    corners = [verts[i] for i in data["corners"]]
    boundary = None if data["boundary"] is None else verts[data["boundary"]]
    word = None if data["word"] is None else WordSpec.parse(data["word"])
    rim = [v for v, f in zip(verts, data["flags"]) if f == RIM]
    labels = {k: verts[i] for k, i in data.get("labels", {}).items()}
    return _graph_from_cells(
        cells, corners, word, data["level"], data["sparsity"], boundary, labels=labels, rim=rim
    )


def dump_graph(g: LatticeGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=1)


def load_graph(text: str) -> LatticeGraph:
    return graph_from_dict(json.loads(text))


def all_words(m: int) -> Iterator[tuple[int, ...]]:
    return product(range(3), repeat=m)
