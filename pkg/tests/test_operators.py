from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglattice.lattice import BOUNDARY, WordSpec, build_truncation
from sglattice.operators import (
    DegenerateGraphError,
    NonSymmetricError,
    VertexFunction,
    apply_laplacian,
    assemble_matrix,
    dirichlet_spectrum,
    eigensolve,
    inner_product,
    matrix_from_text,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def test_constants_are_harmonic():
    for word in (WordSpec.const(0), WordSpec.periodic("012")):
        g = build_truncation(word, 3)
        lap = apply_laplacian(VertexFunction.constant(g, Fraction(3)))
        assert all(x == 0 for _, x in lap.items())


def test_matches_networkx_laplacian_without_boundary():
    g = build_truncation(WordSpec.periodic("01"), 3)
    nxg = nx.Graph(list(g.edges))
    ref = nx.laplacian_matrix(nxg, nodelist=list(g.vertices)).toarray()
    om = assemble_matrix(g)
    idx = [list(g.vertices).index(v) for v in om.vertices]
    assert np.array_equal(om.to_numpy(), ref[np.ix_(idx, idx)])


@given(st.lists(small, min_size=42, max_size=42), st.lists(small, min_size=42, max_size=42))
def test_self_adjoint_with_boundary_weight(u, w):
    g = build_truncation(WordSpec.const(0), 3)
    free = [v for v in g.vertices if not g.is_rim(v)]
    f = VertexFunction(g, dict(zip(free, u)))
    h = VertexFunction(g, dict(zip(free, w)))
    assert inner_product(apply_laplacian(f), h) == inner_product(f, apply_laplacian(h))


def test_boundary_row_and_similarity():
    g = build_truncation(WordSpec.const(0), 2)
    om = assemble_matrix(g, dirichlet=False)
    b = om.vertices.index(g.boundary)
    assert g.flags[g.boundary] == BOUNDARY
    assert sorted(om.matrix[b]) [:2] == [-2, -2] and om.weights[b] == Fraction(1, 2)
    s = om.symmetric()
    assert np.allclose(s, s.T)
    assert om.metadata["convention"] == "sqrt-mu-similarity"


def test_eigensolve_groups_and_residuals():
    groups = dirichlet_spectrum(build_truncation(WordSpec.periodic("01"), 2))
    assert sum(g.multiplicity for g in groups) == 12
    assert all(g.residual <= 1e-9 for g in groups)
    with pytest.raises(NonSymmetricError):
        eigensolve(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_single_cell_is_degenerate():
    with pytest.raises(DegenerateGraphError):
        assemble_matrix(build_truncation(WordSpec.periodic("01"), 0))


def test_text_round_trip():
    om = assemble_matrix(build_truncation(WordSpec.periodic("01"), 2))
    rows, meta = matrix_from_text(om.to_text())
    assert rows == om.matrix and meta["convention"] == "unweighted"
