"""Spectral decimation: the map R, its inverse branches, eigenfunction
extension from a coarse graph to its subdivision, the Dirichlet spectrum of
Gamma and the transfer coefficients on Gamma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from . import exact
from .exact import DEFAULT_TOL, as_scalar, in_set, is_exact, is_zero
from .lattice import (
    GAMMA_X,
    GAMMA_Y,
    RIM,
    LatticeGraph,
    VertexId,
    build_gamma,
)
from .operators import VertexFunction, assemble_matrix, eigensolve, laplacian_at

# values where the extension of Prop. "spectral decimation" is singular
FORBIDDEN = (Fraction(2), Fraction(5), Fraction(6))
# Dirichlet eigenvalues of Gamma; the transfer coefficients need to avoid them
GAMMA_DIRICHLET = (Fraction(1), Fraction(2), Fraction(4), Fraction(5), Fraction(6))
FLOAT_EXCLUSION = 1e-10


class ForbiddenEigenvalueError(ValueError):
    pass


class DirichletEigenvalueError(ValueError):
    pass


class InvalidInputError(ValueError):
    pass


def R(lam):
    """The decimation polynomial ``lam * (5 - lam)``."""
    lam = as_scalar(lam)
    return lam * (5 - lam)


def R_iter(lam, k: int):
    for _ in range(k):
        lam = R(lam)
    return lam


def R_prime(lam):
    return 5 - 2 * lam


def preimages(v):
    """The two solutions ``(phi_-(v), phi_+(v))`` of ``R(lam) = v``.

    Exact when ``25 - 4v`` is rational (the result is rational or a
    quadratic surd); otherwise float, or complex when ``v > 25/4``.
    """
    v = as_scalar(v)
    root = exact.sqrt(25 - 4 * v)
    if is_exact(root):
        return (5 - root) / 2, (5 + root) / 2
    minus, plus = (5 - root) / 2, (5 + root) / 2
    if isinstance(minus, complex) and minus.imag == 0:
        minus, plus = minus.real, plus.real
    return minus, plus


def phi(sign: str, v):
    m, p = preimages(v)
    return m if sign == "-" else p


def apply_branches(word: str, seed):
    """``phi_{w1} o phi_{w2} o ... o phi_{wd} (seed)``."""
    x = as_scalar(seed)
    for s in reversed(word):
        x = phi(s, x)
    return x


@dataclass(frozen=True)
class DecimationValue:
    lam: object
    branch_word: str
    depth: int
    seed: object

    @classmethod
    def from_seed(cls, seed, branch_word: str) -> "DecimationValue":
        return cls(apply_branches(branch_word, seed), branch_word, len(branch_word), as_scalar(seed))

    def check(self, rel_tol: float = DEFAULT_TOL) -> bool:
        back = R_iter(self.lam, self.depth)
        if is_exact(back) and is_exact(self.seed):
            return back == self.seed
        return abs(complex(back) - complex(self.seed)) <= rel_tol * max(1.0, abs(complex(self.seed)))


def _excluded(lam, values) -> bool:
    return in_set(lam, values, FLOAT_EXCLUSION)


def extension_weights(lam):
    """Midpoint weights ``(near, far)``: the midpoint of corners ``a, b`` in a
    cell with third corner ``c`` gets ``near*(f_a+f_b) + far*f_c``."""
    lam = as_scalar(lam)
    den = (2 - lam) * (5 - lam)
    return (4 - lam) / den, 2 / den


def _midpoint(a: VertexId, b: VertexId) -> VertexId:
    pa, pb = a.point(), b.point()
    return VertexId.from_point((pa[0] + pb[0]) / 2, (pa[1] + pb[1]) / 2)


def eigen_defect(f: VertexFunction, lam, v: VertexId):
    """``-Delta f(v) - lam f(v)``."""
    return -laplacian_at(f, v) - lam * f[v]


def extend_eigenfunction(
    f_coarse: VertexFunction, lam, g_fine: LatticeGraph, tol: float = DEFAULT_TOL
) -> VertexFunction:
    """Extend an ``R(lam)``-eigenfunction of a coarse graph to a
    ``lam``-eigenfunction of its subdivision ``g_fine``."""
    lam = as_scalar(lam)
    if _excluded(lam, FORBIDDEN):
        raise ForbiddenEigenvalueError(f"lambda={lam} is in the forbidden set {{2,5,6}}")
    gc = f_coarse.graph
    coarse_lam = R(lam)
    for v in gc.vertices:
        if gc.flags[v] == RIM:
            continue
        if not is_zero(eigen_defect(f_coarse, coarse_lam, v), tol):
            raise InvalidInputError(f"coarse eigen-equation fails at {v}")
    near, far = extension_weights(lam)
    values = {v: f_coarse[v] for v in gc.vertices}
    for cell in gc.cells:
        for i, j, k in ((0, 1, 2), (1, 2, 0), (0, 2, 1)):
            m = _midpoint(cell[i], cell[j])
            if m not in g_fine:
                raise InvalidInputError("fine graph does not subdivide the coarse graph")
            values[m] = near * (f_coarse[cell[i]] + f_coarse[cell[j]]) + far * f_coarse[cell[k]]
    missing = [v for v in g_fine.vertices if v not in values]
    if missing:
        raise InvalidInputError("fine graph has vertices outside the coarse cells")
    return VertexFunction(g_fine, values)


# -- Gamma ---------------------------------------------------------------


def gamma_matrix(gamma: Optional[LatticeGraph] = None) -> list[list[Fraction]]:
    """Exact 7x7 Dirichlet matrix of ``-Delta`` on ``y0..y6``."""
    gamma = gamma or build_gamma()
    om = assemble_matrix(gamma, dirichlet=True)
    order = [om.vertices.index(gamma[y]) for y in GAMMA_Y]
    return [[om.matrix[i][j] for j in order] for i in order]


@dataclass
class GammaEigenspace:
    value: Fraction
    multiplicity: int
    basis: list[list[Fraction]]  # vectors over y0..y6


def dirichlet_gamma_spectrum() -> list[GammaEigenspace]:
    """Dirichlet eigenvalues of Gamma with exact eigenbases.

    Candidate values come from the float oracle, are snapped to rationals
    and certified by exact null-space computation; the certified
    multiplicities must fill all 7 dimensions.
    """
    m = gamma_matrix()
    groups = eigensolve(np.array([[float(x) for x in row] for row in m]))
    out = []
    for grp in groups:
        lam = Fraction(grp.value).limit_denominator(1000)
        shifted = [[m[i][j] - (lam if i == j else 0) for j in range(7)] for i in range(7)]
        basis = exact.nullspace(shifted)
        if len(basis) != grp.multiplicity:
            raise ArithmeticError(f"eigenvalue {lam} failed exact certification")
        out.append(GammaEigenspace(lam, len(basis), basis))
    if sum(e.multiplicity for e in out) != 7:
        raise ArithmeticError("exact eigenspaces do not span l(Gamma)")
    return out


def gamma_function(values_y: Iterable, values_x: Iterable = (0, 0, 0, 0)) -> VertexFunction:
    g = build_gamma()
    vals = {g[n]: as_scalar(x) for n, x in zip(GAMMA_Y, values_y)}
    vals.update({g[n]: as_scalar(x) for n, x in zip(GAMMA_X, values_x)})
    return VertexFunction(g, vals)


@dataclass
class TransferCoefficients:
    c: list
    lam: object
    defect: object  # max identity defect over the 11 unit functions on Gamma

    def __getitem__(self, i):
        return self.c[i]


def transfer_identity_defect(c: list, lam, f: VertexFunction):
    """``(R(lam) + Delta_{(-1)}) f(y0) - sum_i c_i (lam + Delta) f(y_i)``."""
    g = f.graph
    y0 = g["y0"]
    lhs = R(lam) * f[y0] + sum((f[g[x]] for x in GAMMA_X), Fraction(0)) - 4 * f[y0]
    rhs = sum(
        (ci * (lam * f[g[y]] + laplacian_at(f, g[y])) for ci, y in zip(c, GAMMA_Y)), Fraction(0)
    )
    return lhs - rhs


def transfer_coefficients(lam, tol: float = DEFAULT_TOL) -> TransferCoefficients:
    """Constants ``c_0..c_6`` expressing the coarse resolvent equation at
    ``y0`` through the fine one on Gamma.

    Column ``j`` is obtained by solving the Dirichlet problem
    ``(lam + Delta) u = e_j`` on the ``y``'s; then
    ``c_j = (R(lam) - 4) u_j(y0)`` because ``u_j`` vanishes on the ``x``'s.
    """
    lam = as_scalar(lam)
    if _excluded(lam, GAMMA_DIRICHLET):
        raise DirichletEigenvalueError(f"lambda={lam} is a Dirichlet eigenvalue of Gamma")
    m = gamma_matrix()
    system = [[(lam if i == j else 0) - m[i][j] for j in range(7)] for i in range(7)]
    c = []
    for j in range(7):
        rhs = [Fraction(int(i == j)) for i in range(7)]
        u = exact.solve(system, rhs, tol=1e-14)
        c.append((R(lam) - 4) * u[0])
    if is_zero(c[0], 0.0):
        raise ArithmeticError("c_0 vanished")
    g = build_gamma()
    defects = [
        transfer_identity_defect(c, lam, VertexFunction(g, {v: Fraction(1)})) for v in g.vertices
    ]
    if all(is_exact(d) for d in defects):
        defect = max(abs(d) for d in defects)
    else:
        defect = max(abs(complex(d)) for d in defects)
    if not is_zero(defect, tol):
        raise ArithmeticError(f"transfer identity defect {defect}")
    return TransferCoefficients(c, lam, defect)


# -- decimation-generated Dirichlet spectra ------------------------------


def decimation_dirichlet_values(n: int) -> list[float]:
    """Distinct Dirichlet eigenvalues of the level-``n`` truncation generated
    by decimation: level 1 gives ``{2, 5}``; each further level takes both
    preimages of every value (dropping the forbidden ones) and adds the new
    values 5 and 6."""
    if n < 1:
        raise ValueError("level must be >= 1")
    values: list = [Fraction(2), Fraction(5)]
    for _ in range(n - 1):
        nxt = []
        for v in values:
            for w in preimages(v):
                if not _excluded(w, FORBIDDEN):
                    nxt.append(w)
        nxt += [Fraction(5), Fraction(6)]
        values = nxt
    return sorted({round(float(complex(v).real), 12) for v in values})
