import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglattice.lattice import (
    BOUNDARY,
    RIM,
    InsufficientWordError,
    VertexId,
    WordSpec,
    address,
    build_gamma,
    build_truncation,
    detect_boundary,
    dump_graph,
    load_graph,
)

words = st.one_of(
    st.builds(WordSpec.const, st.integers(0, 2), st.text("012", max_size=3)),
    st.builds(WordSpec.periodic, st.text("012", min_size=1, max_size=4), st.text("012", max_size=2)),
)


def _reference_graph(word: WordSpec, n: int) -> nx.Graph:
    """Truncation built from float coordinates and the ordinary IFS maps."""
    q = [(0.5, 0.5 * 3**0.5), (0.0, 0.0), (1.0, 0.0)]
    g = nx.Graph()
    for addr in itertools.product(range(3), repeat=n):
        pts = []
        for i in range(3):
            p = q[i]
            for d in reversed(addr):
                p = ((p[0] + q[d][0]) / 2, (p[1] + q[d][1]) / 2)
            for d in reversed(word.digits(n)):
                p = (2 * p[0] - q[d][0], 2 * p[1] - q[d][1])
            pts.append((round(p[0], 9), round(p[1], 9)))
        g.add_edges_from(itertools.combinations(pts, 2))
    return g


@pytest.mark.parametrize("n", range(5))
def test_counts(n):
    g = build_truncation(WordSpec.periodic("01"), n)
    assert len(g) == 3 * (3**n + 1) // 2
    assert len(g.edges) == 3 ** (n + 1)


@given(words, st.integers(1, 4))
def test_matches_float_reference(word, n):
    g = build_truncation(word, n)
    ref = _reference_graph(word, n)
    ours = nx.Graph()
    for a, b in g.edges:
        ours.add_edge(tuple(round(c, 9) for c in a.xy()), tuple(round(c, 9) for c in b.xy()))
    assert nx.utils.graphs_equal(ours, ref)


@given(words, st.integers(2, 4))
def test_degrees_and_flags(word, n):
    g = build_truncation(word, n)
    for v in g.vertices:
        if g.flags[v] == RIM:
            assert g.degree(v) == 2
        elif g.flags[v] == BOUNDARY:
            assert g.degree(v) == 2 and v == detect_boundary(word)
        else:
            assert g.degree(v) == 4


def test_boundary_detection():
    assert detect_boundary(WordSpec.periodic("01")) is None
    assert detect_boundary(WordSpec.const(0)) == VertexId.from_point(Fraction(1, 2), Fraction(1, 2))
    assert detect_boundary(WordSpec.const(1, "2")) is not None


def test_insufficient_word():
    with pytest.raises(InsufficientWordError, match="insufficient word"):
        build_truncation(WordSpec.parse("tail=none;prefix=12"), 3)


def test_word_spec_round_trip():
    for text in ("prefix=12;tail=const:0", "tail=periodic:01", "prefix=2;tail=none"):
        assert WordSpec.parse(str(WordSpec.parse(text))) == WordSpec.parse(text)


@given(words, st.integers(1, 5), st.integers(0, 2))
def test_inward_address_returns_to_origin_cell(word, m, i):
    inner = tuple(reversed(word.digits(m)))
    assert address(word, m, i, inner) == address(word, 0, i)


def test_gamma_shape():
    g = build_gamma()
    assert len(g) == 11 and len(g.edges) == 18
    assert sorted(g.degree(v) for v in g.interior()) == [4] * 7
    assert g.neighbors(g["y0"]) and g.degree(g["x1"]) == 2


def test_json_round_trip():
    for g in (build_truncation(WordSpec.const(0), 3), build_gamma()):
        assert load_graph(dump_graph(g)) == g
