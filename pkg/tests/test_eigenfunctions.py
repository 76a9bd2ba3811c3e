from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglattice.decimation import gamma_function
from sglattice.eigenfunctions import (
    A_MATRICES,
    AnchorError,
    DimensionError,
    FourSeriesSpec,
    ForbiddenBranchError,
    build_4_series,
    build_series_eigenfunction,
    dump_eigenfunction,
    eigenspace_dimension_4,
    four_series_basis,
    is_signed_permutation,
    load_eigenfunction,
    matmul,
    matvec,
    seed_five,
    seed_six,
    verify_eigen,
)
from sglattice.exact import exact_sqrt
from sglattice.lattice import RIM, WordSpec, _vid, _Q, address, build_truncation
from sglattice.operators import VertexFunction

F = Fraction
IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
no_boundary = st.builds(WordSpec.periodic, st.sampled_from(["01", "012", "021", "12", "0112"]), st.text("012", max_size=2))
small = st.fractions(min_value=-9, max_value=9, max_denominator=5)


def test_a_matrix_algebra():
    for a in A_MATRICES:
        assert is_signed_permutation(a)
        assert matmul(a, a) == IDENTITY
        assert all(a[i][j] == a[j][i] for i in range(3) for j in range(3))
    for a in A_MATRICES:
        for b in A_MATRICES:
            assert is_signed_permutation(matmul(a, b))


@given(no_boundary, small, small, small, st.integers(1, 4))
def test_four_series_no_boundary(word, a, b, c, radius):
    ef = build_4_series(FourSeriesSpec(a, b, c, word, radius))
    assert verify_eigen(ef, 4) == 0
    vals = set(ef.function.values.values())
    assert vals <= {a, -a, b, -b, c, -c}
    assert ef.function.sup_norm() == pytest.approx(float(max(abs(a), abs(b), abs(c))))


@given(no_boundary, st.integers(1, 6), st.lists(small, min_size=3, max_size=3))
def test_outward_then_inward_returns_seed(word, m, seed):
    w = tuple(seed)
    for d in word.digits(m):
        w = matvec(A_MATRICES[d], w)
    for d in reversed(word.digits(m)):
        w = matvec(A_MATRICES[d], w)
    assert list(w) == seed


def test_four_series_keeps_q_values():
    word = WordSpec.parse("prefix=21;tail=periodic:01")
    ef = build_4_series(FourSeriesSpec(1, 2, 3, word, 4))
    assert [ef.function[_vid(p)] for p in _Q] == [1, 2, 3]


def test_four_series_first_shells():
    # word 2,1,...: the cell one level out carries a signed permutation of (a,b,c)
    word = WordSpec.parse("prefix=21;tail=periodic:01")
    a, b, c = F(2), F(3), F(5)
    ef = build_4_series(FourSeriesSpec(a, b, c, word, 2))
    f = ef.function
    one = [f[address(word, 1, i)] for i in range(3)]
    assert sorted(map(abs, one)) == [2, 3, 5]
    assert one == list(matvec(A_MATRICES[2], (a, b, c)))


def test_boundary_constraint():
    word = WordSpec.const(0)
    assert four_series_basis(word, 3) == [(1, 0, 0), (0, -1, 1)]
    ef = build_4_series(FourSeriesSpec(F(7), F(-2), F(2), word, 5))
    assert verify_eigen(ef, 4) == 0
    with pytest.raises(DimensionError, match="two dimensional"):
        build_4_series(FourSeriesSpec(1, 2, 3, word, 3))


def test_zero_seed():
    ef = build_4_series(FourSeriesSpec(0, 0, 0, WordSpec.periodic("01"), 3))
    assert not ef.function.support()


@pytest.mark.parametrize(
    "word,dim", [(WordSpec.periodic("01"), 3), (WordSpec.const(0), 2), (WordSpec.const(1), 2), (WordSpec.const(2, "01"), 2)]
)
def test_eigenspace_dimension(word, dim):
    assert eigenspace_dimension_4(word, 3) == dim


def test_seeds_from_patches():
    six = dict(seed_six())
    assert sorted(six.values()) == [-1, -1, -1, -1, 1, 1, 2]
    five = dict(seed_five())
    assert sorted(five.values()) == [-1, -1, -1, 1, 1, 1]


@pytest.mark.parametrize(
    "series,m,branch,lam",
    [
        (6, 0, "", F(6)),
        (6, 1, "+", F(3)),
        (5, 0, "", F(5)),
        (5, 1, "-", (5 - exact_sqrt(5)) / 2),
        (5, 1, "+", (5 + exact_sqrt(5)) / 2),
        (6, 2, "-+", (5 - exact_sqrt(13)) / 2),
    ],
)
def test_series_eigenfunctions_exact(series, m, branch, lam):
    ef = build_series_eigenfunction(series, (), m, branch)
    assert ef.eigenvalue == lam
    assert verify_eigen(ef, lam) == 0
    g = ef.graph
    assert all(g.flags[v] != RIM for v in ef.function.support())


def test_series_eigenfunction_float_branch():
    ef = build_series_eigenfunction(5, (), 3, "+-+")
    assert verify_eigen(ef, ef.eigenvalue) <= 1e-10


def test_support_grows_with_scale():
    sizes = [len(build_series_eigenfunction(6, (), m, "+" * m).function.support()) for m in range(3)]
    assert sizes == sorted(sizes) and sizes[0] == 7


def test_anchor_inside_larger_truncation():
    word = WordSpec.const(0)
    ef = build_series_eigenfunction(6, (1, 2), 1, "+", word=word)
    assert ef.graph.level == 5 and verify_eigen(ef, 3) == 0
    with pytest.raises(AnchorError):
        build_series_eigenfunction(6, (1,), 1, "+", word=word, level=5)


def test_forbidden_branch():
    with pytest.raises(ForbiddenBranchError):
        build_series_eigenfunction(6, (), 1, "-")


def test_verify_eigen_examples():
    assert verify_eigen(gamma_function([1, 0, 0, 0, 0, -1, -1]), 4) == 0
    g = build_truncation(WordSpec.periodic("01"), 2)
    f = VertexFunction.constant(g, F(1))
    assert verify_eigen(f, 1) == 1


@pytest.mark.parametrize(
    "ef",
    [
        build_4_series(FourSeriesSpec(1, 2, 3, WordSpec.periodic("01"), 3)),
        build_series_eigenfunction(5, (), 1, "-"),
        build_series_eigenfunction(6, (), 3, "+-+"),
    ],
)
def test_json_round_trip(ef):
    assert load_eigenfunction(dump_eigenfunction(ef)) == ef
