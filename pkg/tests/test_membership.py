import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fogmind.fuzzy import (
    Gaussian,
    InvalidBoundsError,
    Singleton,
    Triangular,
    make_gaussian,
    membership_degree,
    mf_center,
)

# sigma for bounds (1, 5): 4 / (2 * sqrt(2 * ln 2)), frozen
SIGMA_1_5 = 1.6986436005760381


def test_gaussian_center_is_bound_midpoint():
    g = make_gaussian(1.0, 5.0)
    assert g.center == 3.0
    assert g.lower == 1.0 and g.upper == 5.0


def test_gaussian_sigma_frozen_value():
    g = make_gaussian(1.0, 5.0)
    assert g.sigma == pytest.approx(SIGMA_1_5, rel=1e-15)


def test_gaussian_half_max_at_both_bounds():
    g = make_gaussian(1.0, 5.0)
    assert g.degree(1.0) == pytest.approx(0.5, abs=1e-12)
    assert g.degree(5.0) == pytest.approx(0.5, abs=1e-12)
    assert g.degree(3.0) == 1.0


def test_gaussian_two_half_widths_out():
    # k half-widths from the center gives exactly 0.5 ** (k * k)
    far = make_gaussian(5.0, 9.0)
    assert far.degree(3.0) == pytest.approx(0.0625, abs=1e-15)
    assert far.degree(11.0) == pytest.approx(0.0625, abs=1e-15)


def test_gaussian_support_is_four_sigma():
    g = make_gaussian(1.0, 5.0)
    lo, hi = g.support
    assert lo == pytest.approx(3.0 - 4.0 * SIGMA_1_5)
    assert hi == pytest.approx(3.0 + 4.0 * SIGMA_1_5)


@given(
    lower=st.floats(-1e3, 1e3),
    width=st.floats(1e-3, 1e3),
)
def test_half_max_convention_holds_for_any_bounds(lower, width):
    g = make_gaussian(lower, lower + width)
    assert g.degree(g.lower) == pytest.approx(0.5, rel=1e-9)
    assert g.degree(g.upper) == pytest.approx(0.5, rel=1e-9)
    assert g.degree(g.center) == 1.0


@given(
    lower=st.floats(-1e3, 1e3),
    width=st.floats(1e-3, 1e3),
    offset=st.floats(0.0, 10.0),
)
def test_gaussian_symmetric_and_monotone(lower, width, offset):
    g = make_gaussian(lower, lower + width)
    left = g.degree(g.center - offset)
    right = g.degree(g.center + offset)
    assert left == pytest.approx(right, rel=1e-12)
    assert g.degree(g.center + offset) >= g.degree(g.center + offset + 1.0)


@pytest.mark.parametrize("lower,upper", [(5.0, 5.0), (5.0, 1.0), (0.0, -1.0)])
def test_gaussian_rejects_degenerate_bounds(lower, upper):
    with pytest.raises(InvalidBoundsError):
        make_gaussian(lower, upper)


def test_triangular_degrees():
    t = Triangular(0.5, 1.0, 1.5)
    assert t.degree(1.0) == 1.0
    assert t.degree(0.75) == pytest.approx(0.5)
    assert t.degree(1.25) == pytest.approx(0.5)
    assert t.degree(0.5) == 0.0
    assert t.degree(1.5) == 0.0
    assert t.degree(-2.0) == 0.0


def test_triangular_peak_on_edge():
    # right-angled shape: peak sits on the support edge and still reads 1
    t = Triangular(0.0, 0.0, 1.0)
    assert t.degree(0.0) == 1.0
    assert t.degree(0.5) == pytest.approx(0.5)
    assert t.degree(1.0) == 0.0


@pytest.mark.parametrize("a,b,c", [(1.0, 0.5, 2.0), (2.0, 2.0, 2.0), (3.0, 2.0, 1.0)])
def test_triangular_rejects_bad_corners(a, b, c):
    with pytest.raises(InvalidBoundsError):
        Triangular(a, b, c)


def test_singleton_degree():
    s = Singleton(7.0)
    assert s.degree(7.0) == 1.0
    assert s.degree(7.0001) == 0.0
    assert s.support == (7.0, 7.0)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
def test_membership_degree_rejects_non_finite(bad):
    g = make_gaussian(0.0, 1.0)
    with pytest.raises(ValueError):
        membership_degree(g, bad)


def test_mf_center_per_shape():
    assert mf_center(make_gaussian(1.0, 5.0)) == 3.0
    assert mf_center(Triangular(0.0, 2.0, 5.0)) == 2.0
    assert mf_center(Singleton(9)) == 9
