"""Concrete eigenfunctions on lattice truncations.

* bounded 4-eigenfunctions built from three signed permutation matrices,
* localized 5- and 6-series eigenfunctions seeded on a small patch and
  pushed to finer scales by spectral decimation,
* a residual checker and a JSON exchange format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import exact
from .decimation import (
    FORBIDDEN,
    ForbiddenEigenvalueError,
    dirichlet_gamma_spectrum,
    eigen_defect,
    extend_eigenfunction,
    phi,
)
from .exact import as_scalar, format_scalar, in_set, is_exact, parse_scalar
from .julia import CodingWord
from .lattice import (
    GAMMA_X,
    GAMMA_Y,
    RIM,
    LatticeGraph,
    VertexId,
    WordSpec,
    _Q,
    _graph_from_cells,
    _vid,
    blow_up,
    build_gamma,
    build_truncation,
    detect_boundary,
    graph_from_dict,
    graph_to_dict,
    subcell,
)
from .operators import VertexFunction

A1 = ((1, 0, 0), (0, 0, -1), (0, -1, 0))
A2 = ((0, 0, -1), (0, 1, 0), (-1, 0, 0))
A3 = ((0, -1, 0), (-1, 0, 0), (0, 0, 1))
A_MATRICES = (A1, A2, A3)  # digit i of an address uses A_MATRICES[i]

MAX_RADIUS = 8


class DimensionError(ValueError):
    pass


class ForbiddenBranchError(ValueError):
    pass


class AnchorError(ValueError):
    pass


def matvec(a, v):
    return tuple(sum((a[i][j] * v[j] for j in range(3)), Fraction(0)) for i in range(3))


def matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def is_signed_permutation(a) -> bool:
    rows_ok = all(sum(1 for x in row if x != 0) == 1 and all(x in (0, 1, -1) for x in row) for row in a)
    cols_ok = all(sum(1 for i in range(3) if a[i][j] != 0) == 1 for j in range(3))
    return rows_ok and cols_ok


@dataclass
class Eigenfunction:
    function: VertexFunction
    eigenvalue: object
    branch: str = ""
    level: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def graph(self) -> LatticeGraph:
        return self.function.graph

    def __eq__(self, other):
        if not isinstance(other, Eigenfunction):
            return NotImplemented
        return (
            self.function.graph == other.function.graph
            and self.function == other.function
            and self.eigenvalue == other.eigenvalue
            and (self.branch, self.level, self.meta) == (other.branch, other.level, other.meta)
        )


def verify_eigen(f, lam, g: Optional[LatticeGraph] = None):
    """``max |Delta f(x) + lam f(x)|`` over non-rim vertices.

    Exact inputs give an exact maximum.
    """
    if isinstance(f, Eigenfunction):
        f = f.function
    if g is not None and g != f.graph:
        raise ValueError("function lives on a different graph")
    lam = as_scalar(lam)
    defects = [eigen_defect(f, lam, v) for v in f.graph.non_rim()]
    if not defects:
        return Fraction(0)
    if all(is_exact(d) for d in defects):
        return max(abs(d) for d in defects)
    return max(abs(complex(d)) for d in defects)


def residual_map(f: VertexFunction, lam) -> dict:
    lam = as_scalar(lam)
    return {v: eigen_defect(f, lam, v) for v in f.graph.non_rim()}


# -- 4-series --------------------------------------------------------------


@dataclass(frozen=True)
class FourSeriesSpec:
    a: object
    b: object
    c: object
    word: WordSpec
    radius: int

    @property
    def seed(self) -> tuple:
        return tuple(as_scalar(x) for x in (self.a, self.b, self.c))


def _four_values(word: WordSpec, radius: int, seed, matrices=A_MATRICES) -> dict:
    """Vertex values of the 4-series extension of ``seed`` on ``V_0``.

    The corner values of the big triangle are obtained by running the
    matrices of the word digits outward; a subcell ``i`` of a cell with
    corner values ``w`` then carries ``A_i w``.
    """
    w = tuple(seed)
    for d in word.digits(radius):
        w = matvec(matrices[d], w)
    cells = [(tuple(blow_up(word.digits(radius), q) for q in _Q), w)]
    for _ in range(radius):
        cells = [(subcell(c, i), matvec(matrices[i], v)) for c, v in cells for i in range(3)]
    values: dict = {}
    for corners, v in cells:
        for p, x in zip(corners, v):
            key = _vid(p)
            if key in values and values[key] != x:
                raise ArithmeticError(f"inconsistent values at shared vertex {key}")
            values[key] = x
    return values


def _boundary_constraint(word: WordSpec, radius: int, matrices=A_MATRICES) -> list:
    """Rows of the linear conditions on ``(a, b, c)`` under which the
    extension satisfies the eigen-equation at every non-rim vertex.

    Away from the boundary vertex the extension is an eigenfunction for any
    seed, so for words with a boundary this is (up to scaling) a single row.
    """
    g = build_truncation(word, radius)
    units = []
    for i in range(3):
        seed = [Fraction(int(i == j)) for j in range(3)]
        units.append(VertexFunction(g, _four_values(word, radius, seed, matrices)))
    rows = []
    for v in g.non_rim():
        row = [eigen_defect(u, 4, v) for u in units]
        if any(x != 0 for x in row):
            rows.append(row)
    return rows


def build_4_series(spec: FourSeriesSpec, matrices=A_MATRICES) -> Eigenfunction:
    """A bounded 4-eigenfunction on the level-``radius`` truncation with
    ``f(q0), f(q1), f(q2) = a, b, c``."""
    if not 1 <= spec.radius <= MAX_RADIUS:
        raise ValueError(f"radius must be in [1, {MAX_RADIUS}]")
    seed = spec.seed
    rows = _boundary_constraint(spec.word, spec.radius, matrices)
    for row in rows:
        val = sum((r * s for r, s in zip(row, seed)), Fraction(0))
        if not exact.is_zero(val, 1e-12):
            raise DimensionError(
                "seed violates the eigen-equation at the boundary vertex; "
                "with a boundary the 4-eigenspace is two dimensional"
            )
    g = build_truncation(spec.word, spec.radius)
    f = VertexFunction(g, _four_values(spec.word, spec.radius, seed, matrices))
    return Eigenfunction(f, Fraction(4), "", spec.radius, {"series": 4, "seed": [format_scalar(x) for x in seed]})


def four_series_basis(word: WordSpec, radius: int) -> list[tuple]:
    """A basis of admissible seeds ``(a, b, c)``."""
    rows = _boundary_constraint(word, radius)
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3)]
    return [tuple(v) for v in exact.nullspace(rows)]


def eigenspace_dimension_4(word: WordSpec, radius: int = 3) -> int:
    """Dimension of the bounded 4-eigenspace, cross-checked by building a
    basis of eigenfunctions and measuring the rank of their values at
    ``q0, q1, q2``."""
    if radius < 2:
        raise ValueError("radius must be >= 2")
    basis = four_series_basis(word, radius)
    dim = len(basis)
    q = [_vid(p) for p in _Q]
    values = []
    for seed in basis:
        ef = build_4_series(FourSeriesSpec(*seed, word, radius))
        if verify_eigen(ef, 4) != 0:
            raise ArithmeticError("basis function fails the eigen-equation")
        values.append([ef.function[v] for v in q])
    if exact.rank(values) != dim:
        raise ArithmeticError("constructed eigenfunctions are dependent")
    expected = 2 if detect_boundary(word) is not None else 3
    if dim != expected:
        raise ArithmeticError(f"dimension {dim}, expected {expected}")
    return dim


# -- localized seeds ---------------------------------------------------------


def localized_eigenvectors(g: LatticeGraph, lam, pinned: Sequence[VertexId]) -> list[dict]:
    """Exact basis of eigenfunctions vanishing on ``pinned`` whose
    eigen-equation holds at every vertex of ``g``, pinned ones included;
    such functions extend by zero to any graph containing ``g`` as a
    patch whose only contact with the rest is through ``pinned``."""
    pinned = set(pinned)
    unknowns = [v for v in g.vertices if v not in pinned]
    pos = {v: i for i, v in enumerate(unknowns)}
    rows = []
    for v in g.vertices:
        row = [Fraction(0)] * len(unknowns)
        if v in pos:
            row[pos[v]] += 4 - lam
        for y in g.neighbors(v):
            if y in pos:
                row[pos[y]] -= 1
        rows.append(row)
    return [dict(zip(unknowns, vec)) for vec in exact.nullspace(rows)]


def _standard_patch(levels: int) -> LatticeGraph:
    cells = [tuple(_Q)]
    for _ in range(levels):
        cells = [subcell(c, i) for c in cells for i in range(3)]
    cells = [tuple(_vid(p) for p in c) for c in cells]
    corners = tuple(_vid(p) for p in _Q)
    return _graph_from_cells(cells, corners, None, levels, 0, None)


@lru_cache(maxsize=None)
def seed_six() -> tuple:
    """The 6-eigenvector of the Dirichlet problem on Gamma, as
    ``((x, y/sqrt3), value)`` pairs in Gamma coordinates.

    Taken from the exact Dirichlet spectrum; it is checked to vanish in the
    neighbour sums at the pinned vertices too, so it is localized.
    """
    space = next(e for e in dirichlet_gamma_spectrum() if e.value == 6)
    if space.multiplicity != 1:
        raise ArithmeticError("6-eigenspace of Gamma is not one dimensional")
    vec = space.basis[0]
    g = build_gamma()
    f = VertexFunction(g, {g[y]: x for y, x in zip(GAMMA_Y, vec)})
    for name in GAMMA_X:
        if sum((f[y] for y in g.neighbors(g[name])), Fraction(0)) != 0:
            raise ArithmeticError("Gamma 6-eigenvector is not localized")
    return tuple((g[y].point(), x) for y, x in zip(GAMMA_Y, vec))


@lru_cache(maxsize=None)
def seed_five() -> tuple:
    """The localized 5-eigenfunction of a twice subdivided cell, as
    ``((x, y/sqrt3), value)`` pairs for the unit cell ``q0 q1 q2``.

    Gamma carries no localized 5-eigenvector; the twice subdivided cell
    carries exactly one, alternating around the central hole.
    """
    g = _standard_patch(2)
    basis = localized_eigenvectors(g, Fraction(5), g.corners)
    if len(basis) != 1:
        raise ArithmeticError(f"expected one localized 5-eigenfunction, found {len(basis)}")
    return tuple((v.point(), x) for v, x in basis[0].items() if x != 0)


def _cell_at(word: WordSpec, level: int, anchor: Sequence[int]):
    corners = tuple(blow_up(word.digits(level), q) for q in _Q)
    for i in anchor:
        corners = subcell(corners, int(i))
    return corners


def _place(pairs, origin, scale) -> dict:
    return {
        _vid((origin[0] + scale * p[0], origin[1] + scale * p[1])): x for p, x in pairs
    }


def seed_function(series: int, g: LatticeGraph, anchor: Sequence[int], m: int) -> VertexFunction:
    """Seed at sparsity ``m`` inside the sparsity-``(m+2)`` cell ``anchor``.

    The 6-seed sits on the copy of Gamma formed by the two lower subcells;
    the 5-seed on the whole anchor cell.
    """
    corners = _cell_at(g.word, g.level, anchor)
    side = corners[2][0] - corners[1][0]
    if series == 6:
        values = _place(seed_six(), corners[1], side / 4)
    elif series == 5:
        values = _place(seed_five(), corners[1], side)
    else:
        raise ValueError("series must be 5 or 6")
    missing = [v for v in values if v not in g]
    if missing:
        raise AnchorError("seed patch does not lie in the truncation")
    if any(g.flags[v] == RIM for v, x in values.items() if x != 0):
        raise AnchorError("anchor too close to the rim")
    return VertexFunction(g, values)


def branch_values(series: int, branch: str) -> list:
    """Eigenvalues ``[lam_0, ..., lam_m]`` at sparsities ``0..m``."""
    vals = [Fraction(series)]
    for j, s in enumerate(reversed(branch)):
        nxt = phi(s, vals[0])
        if in_set(nxt, FORBIDDEN, 1e-10):
            raise ForbiddenBranchError(
                f"branch symbol {s!r} at step {j + 1} reaches the forbidden value {format_scalar(nxt)}"
            )
        vals.insert(0, nxt)
    return vals


def build_series_eigenfunction(
    series: int,
    anchor: Sequence[int] = (),
    m: int = 0,
    branch: CodingWord | str = "",
    word: Optional[WordSpec] = None,
    level: Optional[int] = None,
) -> Eigenfunction:
    """Localized ``lam``-eigenfunction with ``lam`` in the 5- or 6-series.

    A seed with eigenvalue ``series`` is placed at sparsity ``m`` and
    extended ``m`` times; ``branch`` (``m`` symbols, first symbol used
    last) selects the inverse branch at each step.
    """
    branch = str(branch.symbols if isinstance(branch, CodingWord) else branch).replace("−", "-")
    if len(branch) != m:
        raise ValueError(f"branch needs {m} symbols, got {len(branch)}")
    word = word or WordSpec.periodic("01")
    level = m + 2 + len(anchor) if level is None else level
    if len(anchor) != level - m - 2:
        raise AnchorError(f"anchor address must have {level - m - 2} digits at level {level}")
    lams = branch_values(series, branch)
    g = build_truncation(word, level, m)
    f = seed_function(series, g, anchor, m)
    if verify_eigen(f, lams[m]) != 0:
        raise ArithmeticError("seed fails the eigen-equation")
    for j in range(m, 0, -1):
        fine = build_truncation(word, level, j - 1)
        try:
            f = extend_eigenfunction(f, lams[j - 1], fine)
        except ForbiddenEigenvalueError as exc:
            raise ForbiddenBranchError(str(exc)) from exc
    meta = {"series": series, "anchor": list(anchor), "m": m, "word": str(word)}
    return Eigenfunction(f, lams[0], branch, level, meta)


def dirichlet_solution(g: LatticeGraph, lam, rim_values: dict) -> VertexFunction:
    """Exact solution of ``-Delta f = lam f`` at all non-rim vertices with
    prescribed rim values."""
    lam = as_scalar(lam)
    unknowns = g.non_rim()
    pos = {v: i for i, v in enumerate(unknowns)}
    a = [[Fraction(0)] * len(unknowns) for _ in unknowns]
    rhs = [Fraction(0)] * len(unknowns)
    for v in unknowns:
        i = pos[v]
        w = 2 if v == g.boundary else 1
        a[i][i] += 4 - lam
        for y in g.neighbors(v):
            if y in pos:
                a[i][pos[y]] -= w
            else:
                rhs[i] += w * as_scalar(rim_values.get(y, 0))
    sol = exact.solve(a, rhs)
    values = {v: sol[pos[v]] for v in unknowns}
    values.update({v: as_scalar(x) for v, x in rim_values.items()})
    return VertexFunction(g, values)


# -- export --------------------------------------------------------------


def _enc(x):
    return format_scalar(x) if is_exact(x) else float(x)


def _dec(x):
    return float(x) if isinstance(x, (int, float)) and not isinstance(x, bool) else parse_scalar(x)


def eigenfunction_to_dict(ef: Eigenfunction) -> dict:
    vals = []
    for v, x in sorted(ef.function.items(), key=lambda kv: kv[0].point()):
        px, py = v.xy()
        vals.append({"id": list(v.triple()), "x": px, "y": py, "value": _enc(x)})
    return {
        "eigenvalue": _enc(ef.eigenvalue),
        "branch": ef.branch,
        "level": ef.level,
        "meta": ef.meta,
        "graph": graph_to_dict(ef.graph),
        "values": vals,
    }


def eigenfunction_from_dict(data: dict) -> Eigenfunction:
    g = graph_from_dict(data["graph"])
    values = {VertexId(*d["id"]): _dec(d["value"]) for d in data["values"]}
    return Eigenfunction(VertexFunction(g, values), _dec(data["eigenvalue"]), data["branch"], data["level"], data["meta"])


def dump_eigenfunction(ef: Eigenfunction) -> str:
    return json.dumps(eigenfunction_to_dict(ef))


def load_eigenfunction(text: str) -> Eigenfunction:
    return eigenfunction_from_dict(json.loads(text))
