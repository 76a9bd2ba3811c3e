"""Graph Laplacian, weighted inner product and a dense eigensolver oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

import numpy as np

from .exact import DEFAULT_TOL, format_scalar, is_exact
from .lattice import BOUNDARY, RIM, LatticeGraph, VertexId

MAX_DENSE_VERTICES = 2000
GROUP_TOL = 1e-7


class DegenerateGraphError(ValueError):
    pass


class NonSymmetricError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


class VertexFunction:
    """Finitely supported function on the vertices of a graph.

    Missing keys read as zero.
    """

    def __init__(self, graph: LatticeGraph, values: Optional[Mapping] = None):
        self.graph = graph
        self.values = dict(values or {})
        bad = [v for v in self.values if v not in graph]
        if bad:
            raise KeyError(f"{len(bad)} vertices outside the graph, e.g. {bad[0]}")

    def __getitem__(self, v: VertexId):
        return self.values.get(v, Fraction(0))

    def __setitem__(self, v: VertexId, value):
        if v not in self.graph:
            raise KeyError(f"{v} is not a vertex of the graph")
        self.values[v] = value

    def __contains__(self, v):
        return v in self.values

    def __len__(self):
        return len(self.values)

    def items(self):
        return self.values.items()

    def support(self) -> set[VertexId]:
        out = set()
        for v, x in self.values.items():
            if is_exact(x):
                if x != 0:
                    out.add(v)
            elif abs(x) > 0:
                out.add(v)
        return out

    def sup_norm(self) -> float:
        return max((abs(complex(x)) for x in self.values.values()), default=0.0)

    def scaled(self, c) -> "VertexFunction":
        return VertexFunction(self.graph, {v: c * x for v, x in self.values.items()})

    def __add__(self, other: "VertexFunction") -> "VertexFunction":
        out = dict(self.values)
        for v, x in other.values.items():
            out[v] = out.get(v, Fraction(0)) + x
        return VertexFunction(self.graph, out)

    def __eq__(self, other):
        if not isinstance(other, VertexFunction):
            return NotImplemented
        keys = set(self.values) | set(other.values)
        return all(self[v] == other[v] for v in keys)

    def __repr__(self):
        return f"VertexFunction(<{len(self.values)} values on {len(self.graph)} vertices>)"

    @classmethod
    def constant(cls, graph: LatticeGraph, c) -> "VertexFunction":
        return cls(graph, {v: c for v in graph.vertices})

    @classmethod
    def delta(cls, graph: LatticeGraph, v: VertexId, value=Fraction(1)) -> "VertexFunction":
        return cls(graph, {v: value})


def laplacian_at(f: VertexFunction, v: VertexId):
    """``(Delta f)(v)`` with the doubled-neighbour rule at the boundary vertex."""
    g = f.graph
    s = sum((f[y] for y in g.neighbors(v)), Fraction(0))
    if g.flags[v] == BOUNDARY:
        s = 2 * s
    return s - 4 * f[v]


def apply_laplacian(f: VertexFunction, g: Optional[LatticeGraph] = None) -> VertexFunction:
    """``Delta f`` on every non-rim vertex.

    Rim vertices are left out: their lattice neighbourhood is cut off by the
    truncation, so a value there would be meaningless.
    """
    if g is not None and g is not f.graph and g != f.graph:
        raise ValueError("function lives on a different graph")
    g = f.graph
    return VertexFunction(g, {v: laplacian_at(f, v) for v in g.vertices if g.flags[v] != RIM})


def inner_product(f: VertexFunction, h: VertexFunction):
    """``sum mu_x f(x) h(x)`` with ``mu = 1/2`` at the boundary vertex."""
    if f.graph is not h.graph and f.graph != h.graph:
        raise ValueError("functions live on different graphs")
    g = f.graph
    keys = set(f.values) & set(h.values)
    return sum((g.mu(v) * f[v] * h[v] for v in keys), Fraction(0))


@dataclass
class OperatorMatrix:
    """Dense matrix of ``-Delta`` on the unknown vertices of a graph.

    ``matrix`` holds exact entries and is not symmetric when the boundary
    vertex is among the unknowns; :meth:`symmetric` returns the float matrix
    conjugated by ``diag(sqrt(mu))``, which is.
    """

    vertices: list[VertexId]
    matrix: list[list]
    weights: list[Fraction]
    dirichlet: bool
    metadata: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.vertices)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrix], dtype=float)

    def symmetric(self) -> np.ndarray:
        s = np.sqrt(np.array([float(w) for w in self.weights]))
        return self.to_numpy() * s[:, None] / s[None, :]

    def matvec(self, f: VertexFunction) -> list:
        x = [f[v] for v in self.vertices]
        return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in self.matrix]

    def to_text(self) -> str:
        lines = [f"# dimension {self.dim} convention {self.metadata['convention']}"]
        lines += [" ".join(format_scalar(x) for x in row) for row in self.matrix]
        return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> tuple[list[list[Fraction]], dict]:
    lines = text.strip().splitlines()
    head = lines[0].lstrip("#").split()
    meta = dict(zip(head[::2], head[1::2]))
    rows = [[Fraction(tok) for tok in line.split()] for line in lines[1:]]
    if len(rows) != int(meta["dimension"]):
        raise ValueError("row count does not match header")
    return rows, meta


def assemble_matrix(g: LatticeGraph, dirichlet: bool = True) -> OperatorMatrix:
    """``-Delta`` restricted to interior vertices (plus the boundary vertex
    when ``dirichlet`` is false); rim vertices are pinned to zero."""
    if len(g) > MAX_DENSE_VERTICES:
        raise ValueError(f"graph has {len(g)} vertices; dense guard is {MAX_DENSE_VERTICES}")
    keep = {"interior"} if dirichlet else {"interior", BOUNDARY}
    verts = [v for v in g.vertices if g.flags[v] in keep]
    if not any(g.flags[v] == "interior" for v in verts):
        raise DegenerateGraphError("graph has no interior vertices")
    pos = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    m = [[Fraction(0)] * n for _ in range(n)]
    for v in verts:
        i = pos[v]
        m[i][i] = Fraction(4)
        w = 2 if g.flags[v] == BOUNDARY else 1
        for y in g.neighbors(v):
            if y in pos:
                m[i][pos[y]] -= w
    weights = [g.mu(v) for v in verts]
    boundary_in = any(w != 1 for w in weights)
    meta = {
        "convention": "sqrt-mu-similarity" if boundary_in else "unweighted",
        "operator": "-laplacian",
        "dirichlet": dirichlet,
    }
    return OperatorMatrix(verts, m, weights, dirichlet, meta)


@dataclass
class EigenGroup:
    value: float
    multiplicity: int
    vectors: np.ndarray
    residual: float

    def as_dict(self) -> dict:
        return {"value": self.value, "multiplicity": self.multiplicity, "residual": self.residual}


def eigensolve(m, tol: float = DEFAULT_TOL, group_tol: float = GROUP_TOL) -> list[EigenGroup]:
    """Full spectrum of a dense symmetric matrix, grouped by multiplicity.

    Backed by LAPACK ``syevd``; every returned pair is checked against
    ``||M v - lambda v||_inf <= tol``.
    """
    a = m.symmetric() if isinstance(m, OperatorMatrix) else np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetricError("matrix is not square")
    if a.size and np.max(np.abs(a - a.T)) > tol:
        raise NonSymmetricError("matrix is not symmetric within tolerance")
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    groups: list[EigenGroup] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > group_tol:
            vals = w[start:i]
            vecs = v[:, start:i]
            lam = float(np.mean(vals))
            res = float(np.max(np.abs(a @ vecs - lam * vecs))) if vecs.size else 0.0
            if res > tol:
                raise ConvergenceError(f"residual {res:.3g} exceeds tol at eigenvalue {lam}")
            groups.append(EigenGroup(lam, i - start, vecs, res))
            start = i
    return groups


def eigen_results_json(groups: Iterable[EigenGroup]) -> str:
    return json.dumps([grp.as_dict() for grp in groups])


def dirichlet_spectrum(g: LatticeGraph, dirichlet: bool = True, tol: float = DEFAULT_TOL):
    return eigensolve(assemble_matrix(g, dirichlet), tol=tol)
