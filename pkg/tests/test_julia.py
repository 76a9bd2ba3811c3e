from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sglattice.decimation import R
from sglattice.exact import exact_sqrt
from sglattice.julia import (
    CodingWord,
    bowen_dimension,
    bowen_function,
    is_in_julia,
    julia_cloud,
    orbit_along,
    pi_approx,
    region_of,
    sigma_family,
)


def test_membership():
    assert is_in_julia(4).status == "in"
    assert is_in_julia(5).status == "in"
    assert is_in_julia(3 + exact_sqrt(3)).status == "in"
    assert is_in_julia(7).status == "out"
    assert is_in_julia(1.2).status == "out"
    # a float point of the Julia set cannot be certified either way
    assert is_in_julia(float(julia_cloud(16).values[12345])).status == "indeterminate"
    with pytest.raises(ValueError):
        is_in_julia(1, escape_radius=4)


def test_cloud_depth_two():
    cloud = julia_cloud(2)
    assert np.allclose(cloud.values, [0, (5 - 5**0.5) / 2, 5, (5 + 5**0.5) / 2])
    assert str(cloud.word(1)) == "-+" and cloud.index("-+") == 1


@given(st.integers(0, 10))
def test_cloud_in_interval_and_maps_back(d):
    cloud = julia_cloud(d)
    assert cloud.values.min() >= 0 and cloud.values.max() <= 5
    back = cloud.values.copy()
    for _ in range(d):
        back = back * (5 - back)
    assert np.allclose(back, 0, atol=1e-6)


@given(st.text("-+", min_size=1, max_size=30))
def test_orbit_follows_shift(word):
    orbit = orbit_along(word, len(word), 4.0)
    for a, b in zip(orbit, orbit[1:]):
        assert abs(a * (5 - a) - b) <= 1e-9
    assert orbit[0] == pytest.approx(pi_approx(word, len(word), 4.0))


def test_regions():
    assert region_of(0) == "A" and region_of(4) == "B" and region_of(5) == "C"
    assert region_of(Fraction(1, 2)) == "indeterminate"


def test_sigma_families():
    s6 = sigma_family(6, 1)
    assert s6.values == [6, 3, (5 - exact_sqrt(13)) / 2, (5 + exact_sqrt(13)) / 2]
    assert len(sigma_family(4, 1)) == 2  # 4 and 1; the other preimage is 4 itself
    assert len(sigma_family(5, 3)) == 15
    for v, w in sigma_family(5, 6).points:
        x = v
        for _ in w:
            x = R(x)
        assert abs(complex(x) - 5) <= 1e-9


def test_coding_word_periodic():
    w = CodingWord("--+", periodic=True)
    assert w.prefix(7) == "--+--+-" and not w.eventually_constant()
    assert CodingWord("+", periodic=True).eventually_constant()


def test_bowen():
    # frozen from this implementation after checking monotonicity and sign change
    assert bowen_dimension(10).dimension == pytest.approx(0.54022, abs=1e-4)
    assert bowen_dimension(14).dimension == pytest.approx(0.54343, abs=1e-4)
    assert bowen_function(0.0, 10) == pytest.approx(np.log(2))
