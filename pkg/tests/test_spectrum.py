from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglattice.eigenfunctions import build_series_eigenfunction, dirichlet_solution
from sglattice.exact import exact_sqrt, parse_scalar
from sglattice.julia import CodingWord, julia_cloud, orbit_along, sigma_family
from sglattice.lattice import WordSpec, address, build_truncation
from sglattice.operators import VertexFunction
from sglattice.spectrum import (
    IndeterminateMembershipError,
    SingularProductError,
    classification_table,
    classify,
    cloud_gap_from_three,
    divergence_check,
    in_spectrum,
    pm_product,
    recursion_check,
    series_of,
    subsequence_witness,
    table_from_csv,
    table_to_csv,
)

F = Fraction


def test_membership_examples():
    assert in_spectrum(6) == "in"
    assert in_spectrum(7) == "out"
    assert in_spectrum(4) == "in"
    assert in_spectrum(2) == "out"  # preimage of 6 outside the 6-series
    assert in_spectrum(float(sigma_family(6, 6).array()[7])) == "in"


def test_series_labels():
    assert series_of(0) == "exceptional"
    assert series_of(1) == "Σ4"
    assert series_of((5 + exact_sqrt(5)) / 2) == "Σ5"
    assert series_of((5 - exact_sqrt(13)) / 2) == "Σ6"
    assert series_of(3 - exact_sqrt(3)) == "julia-generic"
    assert series_of(7) == "none"
    assert series_of(1.0 + 1e-12) == "Σ4"


@pytest.mark.parametrize(
    "lam,space,boundary,verdict,series",
    [
        (4, "1", True, "residual", "Σ4"),
        (6, "2", True, "point", "Σ6"),
        (0, "2", True, "continuous", "exceptional"),
        (0, "inf", True, "point", "exceptional"),
        (5, "c0", False, "point", "Σ5"),
        (4, "inf", False, "open", "Σ4"),
        (7, "1", True, "resolvent", "none"),
        (3 + exact_sqrt(3), "1", True, "continuous", "julia-generic"),
        (3 + exact_sqrt(3), "3.5", False, "continuous", "julia-generic"),
    ],
)
def test_classify(lam, space, boundary, verdict, series):
    c = classify(lam, space, boundary)
    assert (c.verdict, c.series) == (verdict, series)


def test_classify_undecided_float():
    with pytest.raises(IndeterminateMembershipError) as info:
        classify(float(julia_cloud(16, 4).values[999]), "2", True)
    assert "float precision" in info.value.certificate or "bounded" in info.value.certificate


@given(st.sampled_from(["0", "3", "4", "5", "(5-sqrt(5))/2", "(5+sqrt(13))/2", "7", "3+sqrt(3)"]))
def test_totality_and_p_independence(text):
    lam = parse_scalar(text)
    rows = [classify(lam, sp, b) for sp in ("1", "1.5", "2", "7", "inf", "c0") for b in (True, False)]
    inside = in_spectrum(lam) == "in"
    for r in rows:
        assert (r.verdict == "resolvent") == (not inside)
    closed = [r for r in rows if r.space not in ("1", "inf") or r.boundary]
    assert all(r.verdict in ("point", "continuous", "residual", "resolvent") for r in closed if r.space != "inf")


def test_csv_round_trip():
    rows = classification_table([F(0), F(6)])
    back = table_from_csv(table_to_csv(rows))
    assert [r["verdict"] for r in back] == [r.verdict for r in rows]
    assert list(back[0]) == ["lambda", "space", "boundary", "verdict", "series", "certificate"]


def test_pm_product_examples():
    assert pm_product(F(7, 3), 0).P_m == 1
    t = pm_product(3, 1)
    assert t.P_m == F(-3, 2) == t.telescoped
    with pytest.raises(SingularProductError):
        pm_product(5, 1)


@given(st.integers(0, 2**10 - 1), st.integers(1, 15))
def test_telescoping(i, m):
    cloud = julia_cloud(10, 4)
    orbit = orbit_along(cloud.word(i).symbols, 10, 4.0) + [4.0] * 5
    t = pm_product(orbit[0], m, orbit=orbit)
    assert t.relative_gap() <= 1e-8


def test_telescoping_exact():
    lam = F(1, 7)
    for m in range(1, 5):
        t = pm_product(lam, m)
        assert abs(t.P_m) == abs(t.telescoped)


def test_alternating_word_example():
    o = orbit_along(CodingWord("-+", True), 12, 4.0)
    assert pm_product(o[0], 12, orbit=o).relative_gap() <= 1e-8


def test_witness_examples():
    w = subsequence_witness(CodingWord("--+", True), 9)
    assert w.n_k == [0, 1, 3, 4, 6, 7] and w.m_k == [1, 2, 4, 5, 7, 8]
    w = subsequence_witness(CodingWord("-+", True), 10)
    assert w.m_k == list(range(10)) and w.n_k == [0, 2, 4, 6, 8]
    w = subsequence_witness(CodingWord("+", True), 10)
    assert w.m_k == [] and w.n_k == [] and "constant" in w.diagnostic


def test_gap_constant():
    assert cloud_gap_from_three() == pytest.approx((5**0.5 - 1) / 2, abs=1e-6)


def test_divergence_near_zero():
    rep = divergence_check("-" * 10 + "+-" * 30, depth=70, threshold=1e3)
    assert rep.m_reached is not None and rep.m_reached <= 40
    assert rep.bound_monotone and rep.bound_holds


@given(st.text("-+", min_size=64, max_size=64).filter(lambda w: len(set(w[32:])) == 2))
def test_divergence_bound_properties(word):
    rep = divergence_check(word, depth=64)
    counts = [c.count_a for c in rep.checkpoints]
    assert counts == sorted(counts)
    assert rep.bound_monotone and rep.bound_holds


W0 = WordSpec.const(0)


@pytest.mark.parametrize("lam", [F(1, 3), F(7, 2), F(-1), F(3, 2)])
def test_recursion_on_exact_solutions(lam):
    g = build_truncation(W0, 4)
    f = dirichlet_solution(g, lam, {address(W0, 4, 1): F(1), address(W0, 4, 2): F(-2)})
    rep = recursion_check(f, lam, 3)
    assert rep.ok(0) and rep.max_residual() == 0
    assert all(rep.residuals[k] for k in ("boundary_relation", "corner_sum", "cell_extension"))


def test_recursion_six_series():
    ef = build_series_eigenfunction(6, (), 1, "+", word=W0)
    rep = recursion_check(ef.function, 3, 1)
    assert dict(rep.residuals["boundary_relation"])[1] == 0 and rep.ok(0)


def test_recursion_constant_and_negative_control():
    g = build_truncation(W0, 3)
    rep = recursion_check(VertexFunction.constant(g, F(1)), 0, 2)
    assert rep.ok(0) and dict(rep.residuals["boundary_relation"])[0] == 0
    f = dirichlet_solution(g, F(1, 3), {address(W0, 3, 1): F(1)})
    f[address(W0, 1, 1)] += 1
    assert not recursion_check(f, F(1, 3), 2).ok()


def test_recursion_requires_level():
    g = build_truncation(W0, 2)
    with pytest.raises(ValueError):
        recursion_check(VertexFunction.constant(g, F(1)), 0, 2)
