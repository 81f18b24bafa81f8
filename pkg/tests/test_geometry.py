import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemniscate.errors import UsageError
from lemniscate.geometry import (
    ClosedCurve,
    convex_hull,
    curve_separation,
    point_in_curve,
    points_in_curve,
    resample_by_arc_length,
    set_diameter,
    signed_area,
)

from conftest import MANY
from oracles import brute_diameter, exact_separation, inside_by_winding, sampled_separation

SQUARE = ClosedCurve([0, 1, 1 + 1j, 1j])


def ngon(n, r=1.0, center=0j):
    return ClosedCurve(center + r * np.exp(2j * np.pi * np.arange(n) / n))


def test_square_membership():
    assert point_in_curve(SQUARE, 0.5 + 0.5j)
    assert not point_in_curve(SQUARE, 2 + 2j)


def test_64gon_contains_point_near_rim():
    poly = ngon(64)
    assert point_in_curve(poly, 0.99)
    assert inside_by_winding(poly.vertices, 0.99)


def test_edge_points_count_as_inside():
    assert point_in_curve(SQUARE, 0.5)  # on the bottom edge
    assert point_in_curve(SQUARE, 1 + 1j)  # a vertex
    assert point_in_curve(SQUARE, 1 + 0.5j + 5e-13)


def test_curve_invariants_enforced():
    with pytest.raises(UsageError):
        ClosedCurve([0, 1])
    with pytest.raises(UsageError):
        ClosedCurve([0, 1j, 1 + 1j, 1])  # clockwise
    with pytest.raises(UsageError):
        ClosedCurve([0, 1, 1, 1j])
    with pytest.raises(UsageError):
        ClosedCurve([0, np.nan, 1j])


def test_simplicity_check():
    assert SQUARE.is_simple()
    assert ngon(50).is_simple()
    bowtie = np.array([0, 2, 2 + 2j, 1 - 1j, 1j])  # crossing edges, positive net area
    assert signed_area(bowtie) > 0
    assert not ClosedCurve(bowtie).is_simple()


@pytest.mark.parametrize(
    "poly",
    [
        ngon(7),
        ClosedCurve([0, 3, 3 + 1j, 1 + 1j, 1 + 3j, 3j]),  # L shape
        ClosedCurve([0, 4, 4 + 4j, 2 + 1j, 4j]),  # notch
        ClosedCurve(np.exp(2j * np.pi * np.arange(40) / 40) * (1 + 0.5 * np.cos(5 * 2 * np.pi * np.arange(40) / 40))),
    ],
)
def test_membership_matches_winding_number(poly):
    rng = np.random.default_rng(7)
    v = poly.vertices
    lo, hi = v.real.min() - 0.5, v.real.max() + 0.5
    z = rng.uniform(lo, hi, 10_000) + 1j * rng.uniform(v.imag.min() - 0.5, v.imag.max() + 0.5, 10_000)
    got = points_in_curve(poly, z)
    want = np.array([inside_by_winding(v, p) for p in z])
    assert np.array_equal(got, want)


def test_diameter_examples():
    assert set_diameter([0]) == 0
    assert set_diameter([0, 3, 4j]) == 5
    with pytest.raises(UsageError):
        set_diameter([])


def test_diameter_matches_brute_force_on_1000_points():
    rng = np.random.default_rng(1)
    p = rng.random(1000) + 1j * rng.random(1000)
    assert abs(set_diameter(p) - brute_diameter(p)) <= 1e-12


point = st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False)


@settings(max_examples=MANY)
@given(st.lists(point, min_size=1, max_size=80))
def test_diameter_agrees_with_brute_force(pts):
    assert set_diameter(pts) == pytest.approx(brute_diameter(pts), rel=1e-12, abs=1e-12)


@settings(max_examples=MANY)
@given(
    st.lists(point, min_size=2, max_size=60),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False),
    point,
)
def test_diameter_scale_and_translation(pts, alpha, beta):
    d = set_diameter(pts)
    moved = set_diameter(alpha * np.array(pts) + beta)
    assert moved / abs(alpha) == pytest.approx(d, rel=1e-12, abs=1e-9 * (1 + abs(beta) / abs(alpha)))


def test_diameter_of_cocircular_points_uses_all_antipodal_pairs():
    z = np.exp(2j * np.pi * np.arange(1000) / 1000)
    assert set_diameter(z) == pytest.approx(2.0, abs=1e-12)


def test_hull_is_ccw_and_drops_collinear():
    h = convex_hull([0, 1, 2, 2 + 2j, 1j * 2, 1 + 1j])
    assert len(h) == 4
    assert signed_area(h) > 0


def test_separation_examples():
    a = ClosedCurve([0, 1, 1 + 1j, 1j])
    # left edges at x=0 and x=3: the gap between unit squares is 2
    assert curve_separation(a, a.translated(3)) == pytest.approx(2.0)
    wide = ClosedCurve([0, 2, 2 + 1j, 1j])
    assert curve_separation(wide, wide.translated(3)) == pytest.approx(1.0)
    inner = ClosedCurve([-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j])
    outer = inner.scaled(3)
    assert curve_separation(inner, outer) == pytest.approx(2.0)
    assert curve_separation(a, a.translated(0.5)) == 0.0


def random_convex(rng, center):
    pts = center + rng.normal(size=30) + 1j * rng.normal(size=30)
    return ClosedCurve(convex_hull(pts))


@pytest.mark.parametrize("seed", range(5))
def test_separation_of_random_convex_polygons(seed):
    rng = np.random.default_rng(seed)
    a = random_convex(rng, 0)
    b = random_convex(rng, 6 + 2j)
    sep = curve_separation(a, b)
    assert sep == pytest.approx(exact_separation(a.vertices, b.vertices), abs=1e-9)
    # dense sampling only approaches from above
    sampled = sampled_separation(a.vertices, b.vertices)
    assert sep <= sampled + 1e-12
    assert sampled - sep < 1e-3


def test_flat_segment_and_resampling():
    seg = ClosedCurve.flat_segment(0, 4, 8)
    assert seg.length == pytest.approx(8.0)
    pts = resample_by_arc_length([seg, ngon(16, 1, 10)], 100)
    assert len(pts) == 100
    on_seg = pts[pts.real < 5]
    ngon_length = 16 * 2 * math.sin(math.pi / 16)
    assert len(on_seg) == round(100 * 8 / (8 + ngon_length))
    assert np.all(on_seg.imag == 0) and np.all((on_seg.real >= 0) & (on_seg.real <= 4))
