import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lemniscate.errors import ParameterError, ResolutionError
from lemniscate.geometry import ClosedCurve, set_diameter
from lemniscate.render import Figure, add_components, component_contours, read_bitmap, write_bitmap
from lemniscate.verifier import (
    MAX_CELLS,
    Component,
    ComponentReport,
    LevelSetRaster,
    auto_bbox,
    boundary_cells,
    check_claim,
    containment_check,
    label_components,
    log_abs_eval,
    polya_directions,
    polya_projection,
    rasterize,
)

from conftest import MANY
from oracles import bfs_labels, brute_diameter, label_partition, zn_minus_one_log_abs


def unity(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def make_raster(mask, cell=1.0, x0=0.0, y0=0.0):
    mask = np.asarray(mask, dtype=bool)
    ny, nx = mask.shape
    return LevelSetRaster((x0, y0, x0 + nx * cell, y0 + ny * cell), nx, ny, cell, mask, 0.0)


# evaluation


def test_log_abs_examples():
    assert log_abs_eval([0], math.e) == pytest.approx(1.0, abs=1e-15)
    assert log_abs_eval(unity(7), 0) == pytest.approx(0.0, abs=1e-14)
    assert log_abs_eval([-1, 1], 2) == pytest.approx(math.log(3), abs=1e-15)
    assert log_abs_eval([0.5, 1j], 1j) == -math.inf


@pytest.mark.parametrize("d", [2, 7, 32])
def test_log_abs_matches_direct_formula(d):
    rng = np.random.default_rng(d)
    z = rng.uniform(-1.5, 1.5, 10_000) + 1j * rng.uniform(-1.5, 1.5, 10_000)
    got = log_abs_eval(unity(d), z)
    want = zn_minus_one_log_abs(z, d)
    # both are sums of d rounded logs; relative agreement near zeros of p
    assert np.max(np.abs(got - want)) <= 1e-9


def test_log_abs_handles_huge_degree():
    roots = 0.5 * unity(20_000)
    v = log_abs_eval(roots, 0.0)
    assert v == pytest.approx(20_000 * math.log(0.5), rel=1e-12)


# rasterization


def test_unit_disk_raster():
    r = rasterize([0], 1.0, (-2, -2, 2, 2), 0.01)
    assert r.nx == r.ny == 400
    assert (r.bbox[2] - r.bbox[0]) / r.nx == pytest.approx(r.cell, abs=1e-12)
    z = r.centers(*np.indices(r.mask.shape))
    assert np.array_equal(r.mask, np.abs(z) <= 1)
    assert r.mask.sum() * r.cell**2 == pytest.approx(math.pi, rel=0.02)


def test_two_wells_raster_matches_direct_formula():
    r = rasterize([-2, 2], 1.0, cell=0.002)
    rng = np.random.default_rng(0)
    j = rng.integers(0, r.ny, 10_000)
    i = rng.integers(0, r.nx, 10_000)
    z = r.centers(j, i)
    assert np.array_equal(r.mask[j, i], np.abs(z**2 - 4) <= 1)
    rep = label_components(r)
    assert rep.n_components == 2
    for d in rep.diameters:
        assert d == pytest.approx(math.sqrt(5) - math.sqrt(3), abs=0.01)
    assert polya_projection(r, 1) == pytest.approx(2 * (math.sqrt(5) - math.sqrt(3)), abs=0.01)


def test_seventh_roots_raster_matches_direct_formula_everywhere():
    level = 0.99999
    r = rasterize(unity(7), level, cell=0.004)
    z = r.centers(*np.indices(r.mask.shape))
    direct = zn_minus_one_log_abs(z, 7)
    # decisions can only differ where the two evaluations straddle the level
    close = np.abs(direct - math.log(level)) < 1e-12
    assert np.array_equal(r.mask[~close], (direct <= math.log(level))[~close])


def test_auto_bbox_is_safe():
    rng = np.random.default_rng(5)
    roots = rng.normal(size=6) + 1j * rng.normal(size=6)
    level = 3.0
    box = auto_bbox(roots, 0.01, level)
    wide = rasterize(roots, level, (-8, -8, 8, 8), 0.01)
    pts = wide.true_centers()
    assert pts.real.min() >= box[0] and pts.real.max() <= box[2]
    assert pts.imag.min() >= box[1] and pts.imag.max() <= box[3]
    auto = rasterize(roots, level, cell=0.01)
    assert auto.mask.sum() == wide.mask.sum()


def test_tiny_log_level():
    # a degree-4000 sup-normalized polynomial: the level underflows a double
    roots = 0.6 * unity(4000)
    log_level = 4000 * math.log(0.6)
    r = rasterize(roots, log_level=log_level, cell=0.01)
    assert r.mask.any()


def test_memory_guard():
    with pytest.raises(ResolutionError, match="cell of at least"):
        rasterize([0], 1.0, (-100, -100, 100, 100), 1e-3)
    assert MAX_CELLS == 2**28


def test_level_must_be_positive():
    with pytest.raises(ParameterError):
        rasterize([0], 0.0)
    with pytest.raises(ParameterError):
        rasterize([0], 1.0, cell=0)


# labeling


def test_label_examples():
    assert label_components(make_raster(np.zeros((5, 5)))).n_components == 0
    m = np.zeros((3, 3), dtype=bool)
    m[1, 0] = m[1, 2] = True
    rep = label_components(make_raster(m))
    assert rep.n_components == 2
    assert rep.diameters == [0.0, 0.0]
    diag = np.eye(3, dtype=bool)
    assert label_components(make_raster(diag)).n_components == 3  # no diagonal leaks


@settings(max_examples=MANY)
@given(st.integers(0, 2**32 - 1), st.integers(2, 24), st.integers(2, 24), st.floats(0.2, 0.8))
def test_labels_match_flood_fill(seed, ny, nx, density):
    rng = np.random.default_rng(seed)
    mask = rng.random((ny, nx)) < density
    rep = label_components(make_raster(mask))
    ref, count = bfs_labels(mask)
    assert rep.n_components == count
    assert label_partition(rep.labels) == label_partition(ref)
    assert sum(c.cells for c in rep.components) == mask.sum()
    assert all(c.diameter >= 0 for c in rep.components)


@settings(max_examples=MANY)
@given(st.integers(0, 2**32 - 1))
def test_labels_independent_of_traversal_order(seed):
    rng = np.random.default_rng(seed)
    mask = rng.random((16, 20)) < 0.55
    base = label_partition(label_components(make_raster(mask)).labels)
    flipped = label_components(make_raster(mask[::-1, ::-1])).labels[::-1, ::-1]
    transposed = label_components(make_raster(mask.T)).labels.T
    assert label_partition(flipped) == base
    assert label_partition(transposed) == base


roots_st = st.lists(
    st.complex_numbers(max_magnitude=1.2, allow_nan=False, allow_infinity=False), min_size=1, max_size=4
)


@settings(max_examples=MANY)
@given(roots_st, st.floats(0.05, 1.5))
def test_boundary_diameter_within_one_cell_diagonal(roots, level):
    r = rasterize(roots, level, (-2.5, -2.5, 2.5, 2.5), 0.1)
    rep = label_components(r)
    for comp in rep.components:
        j, i = np.nonzero(rep.labels == comp.id)
        full = brute_diameter(r.centers(j, i)) if len(j) < 400 else set_diameter(r.centers(j, i))
        assert abs(full - comp.diameter) <= r.cell * math.sqrt(2) + 1e-12


@settings(max_examples=MANY)
@given(roots_st, st.floats(0.05, 1.5), st.floats(0, math.pi))
def test_polya_bounds(roots, level, angle):
    r = rasterize(roots, level, (-2.5, -2.5, 2.5, 2.5), 0.1)
    u = complex(math.cos(angle), math.sin(angle))
    total = polya_projection(r, u)
    corners = np.array([r.bbox[0] + 1j * r.bbox[1], r.bbox[2] + 1j * r.bbox[1], r.bbox[0] + 1j * r.bbox[3], r.bbox[2] + 1j * r.bbox[3]])
    extent = np.ptp((corners * np.conj(u)).real)
    assert total <= extent + r.cell + 1e-9
    rep = label_components(r)
    for comp in rep.components:
        j, i = np.nonzero(rep.labels == comp.id)
        t = (r.centers(j, i) * np.conj(u)).real
        assert total >= np.ptp(t) - 1e-9


def test_boundary_cells_include_raster_edge():
    m = np.ones((4, 4), dtype=bool)
    b = boundary_cells(m)
    assert b[0].all() and b[-1].all() and b[:, 0].all() and b[:, -1].all()
    assert not b[1:3, 1:3].any()


def test_zn_components_by_level():
    for level, count in ((0.9, 7), (0.99999, 7), (1.01, 1)):
        rep = label_components(rasterize(unity(7), level, cell=0.002))
        assert rep.n_components == count, level


# claims and projections


def report_with(diams, cell=0.01):
    comps = [Component(k + 1, 1, d, (0, 0, 0, 0)) for k, d in enumerate(diams)]
    return ComponentReport(comps, cell)


def test_check_claim_examples():
    v = check_claim(report_with([2.5, 2.4, 2.45]), 3, 2.3)
    assert v.passed and v.label == "PASS" and v.top_diameters == [2.5, 2.45, 2.4]
    assert not check_claim(report_with([2.5, 1.0]), 2, 2.3).passed
    assert check_claim(report_with([]), 0, 2.3).passed
    # one cell-diagonal of slack
    assert check_claim(report_with([2.3 - 0.014]), 1, 2.3).passed
    assert not check_claim(report_with([2.3 - 0.015]), 1, 2.3).passed


def test_unit_disk_projection():
    cell = 0.005
    r = rasterize([0], 1.0, cell=cell)
    for u in polya_directions(16):
        assert polya_projection(r, u) == pytest.approx(2.0, abs=2 * cell)
    with pytest.raises(ParameterError):
        polya_projection(r, 1.5)


def test_polya_bound_for_z7_at_level_one():
    r = rasterize(unity(7), 1.0, cell=0.002)
    assert max(polya_projection(r, u) for u in polya_directions(16)) <= 4 + 2 * r.cell


def test_containment_examples():
    sq = ClosedCurve([0.5, 1.5, 1.5 + 0.5j, 0.5 + 0.5j])
    c = 2.0
    r = rasterize([0], 1.0, (0, -1, 2, 1), 0.01)
    z = r.centers(*np.indices(r.mask.shape))
    inside_sq = (z.real >= 0.5) & (z.real <= 1.5) & (z.imag >= 0) & (z.imag <= 0.5)
    exact = LevelSetRaster(r.bbox, r.nx, r.ny, r.cell, inside_sq, 0.0)
    assert containment_check(exact, [sq], 1e-6, c) == 0
    planted = inside_sq.copy()
    far = np.unravel_index(np.argmin(np.abs(z - (1.0 - 0.6j))), z.shape)
    planted[far] = True
    bad = LevelSetRaster(r.bbox, r.nx, r.ny, r.cell, planted, 0.0)
    assert containment_check(bad, [sq], 0.05, c) >= 1
    # outside the ellipse counts even when next to a strip
    outside = np.zeros_like(inside_sq)
    outside[np.unravel_index(np.argmin(np.abs(z - (1.0 + 0.9j))), z.shape)] = True
    assert containment_check(LevelSetRaster(r.bbox, r.nx, r.ny, r.cell, outside, 0.0), [sq], 10.0, c) == 1


# export


def test_bitmap_round_trip(tmp_path):
    r = rasterize([-2, 2], 1.0, cell=0.02)
    path = tmp_path / "r.pbm"
    write_bitmap(r, path)
    head = path.read_text().splitlines()[0].split()
    assert head[:2] == [str(r.nx), str(r.ny)] and len(head) == 7
    back = read_bitmap(path)
    assert np.array_equal(back.mask, r.mask)
    assert back.bbox == r.bbox


def test_contours_and_svg(tmp_path):
    r = rasterize(unity(3), 0.5, cell=0.01)
    rep = label_components(r)
    outlines = component_contours(r, rep.labels)
    assert len(outlines) == rep.n_components == 3
    for curves, comp in zip(outlines, rep.components):
        z = np.concatenate(curves)
        x0, y0, x1, y1 = comp.bbox
        assert z.real.min() >= x0 - r.cell and z.real.max() <= x1 + r.cell
        assert z.imag.min() >= y0 - r.cell and z.imag.max() <= y1 + r.cell
    fig = Figure()
    add_components(fig, r, rep.labels)
    fig.save(tmp_path / "f.svg")
    text = (tmp_path / "f.svg").read_text()
    assert text.startswith("<svg") and text.count("<path") == 3
    assert text.index('id="component-1-0"') < text.index('id="component-2-0"')
