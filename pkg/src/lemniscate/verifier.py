"""Rasterized sublevel sets of root-product polynomials and their components.

All evaluation happens in log space: a cell is inside when
``sum_k log|z - r_k| <= log(level)`` at its center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import _kernels
from .domain import omega_contains
from .errors import ParameterError, ResolutionError
from .geometry import ClosedCurve, distance_to_curve, points_in_curve, set_diameter

MAX_CELLS = 2**28
_ROW_CHUNK = 256
_CROSS = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True, eq=False)
class LevelSetRaster:
    """``mask[j, i]`` is the cell centered at ``(x0 + (i+1/2) cell, y0 + (j+1/2) cell)``."""

    bbox: tuple[float, float, float, float]
    nx: int
    ny: int
    cell: float
    mask: np.ndarray
    log_level: float

    @property
    def level(self) -> float:
        return math.exp(self.log_level)

    @property
    def xs(self) -> np.ndarray:
        return self.bbox[0] + (np.arange(self.nx) + 0.5) * self.cell

    @property
    def ys(self) -> np.ndarray:
        return self.bbox[1] + (np.arange(self.ny) + 0.5) * self.cell

    def centers(self, j, i) -> np.ndarray:
        return (self.bbox[0] + (np.asarray(i) + 0.5) * self.cell) + 1j * (
            self.bbox[1] + (np.asarray(j) + 0.5) * self.cell
        )

    def true_centers(self) -> np.ndarray:
        j, i = np.nonzero(self.mask)
        return self.centers(j, i)


@dataclass(frozen=True)
class Component:
    id: int
    cells: int
    diameter: float
    bbox: tuple[float, float, float, float]


@dataclass(frozen=True)
class ComponentReport:
    components: list[Component]
    cell: float
    labels: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def diameters(self) -> list[float]:
        return sorted((c.diameter for c in self.components), reverse=True)

    @property
    def diameter_error(self) -> float:
        return self.cell * math.sqrt(2.0)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    n_required: int
    c_min: float
    top_diameters: list[float]

    def __bool__(self):
        return self.passed

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _split(roots):
    r = np.atleast_1d(np.asarray(roots, dtype=np.complex128)).ravel()
    return np.ascontiguousarray(r.real), np.ascontiguousarray(r.imag)


def log_abs_eval(roots, z):
    """``sum_k log|z - r_k|``; ``-inf`` at a root."""
    z = np.asarray(z, dtype=np.complex128)
    rr, ri = _split(roots)
    flat = np.atleast_1d(z).ravel()
    out = _kernels.log_abs_many(np.ascontiguousarray(flat.real), np.ascontiguousarray(flat.imag), rr, ri)
    return float(out[0]) if z.ndim == 0 else out.reshape(z.shape)


def _resolve_log_level(level, log_level):
    if log_level is None:
        if level is None or not level > 0:
            raise ParameterError("level must be positive")
        return math.log(level)
    return float(log_level)


def auto_bbox(roots, cell: float, level: float | None = None, *, log_level: float | None = None, coarse: int = 128):
    """A cell-aligned box guaranteed to contain the sublevel set.

    ``|p(z)| <= level`` forces some ``|z - r_k| <= level^(1/d)``, which gives a
    safe outer box. A coarse grid over that box then discards every square on
    which a lower bound of ``log|p|`` already exceeds the level.
    """
    log_level = _resolve_log_level(level, log_level)
    rr, ri = _split(roots)
    d = len(rr)
    reach = math.exp(log_level / d)
    lo_x, hi_x = rr.min() - reach, rr.max() + reach
    lo_y, hi_y = ri.min() - reach, ri.max() + reach
    step = max(hi_x - lo_x, hi_y - lo_y) / coarse
    nx = max(1, int(math.ceil((hi_x - lo_x) / step)))
    ny = max(1, int(math.ceil((hi_y - lo_y) / step)))
    xs = lo_x + (np.arange(nx) + 0.5) * step
    ys = lo_y + (np.arange(ny) + 0.5) * step
    lb = np.empty((ny, nx))
    _kernels.log_abs_lower_bound_grid(xs, ys, step * math.sqrt(0.5), rr, ri, lb)
    keep = lb <= log_level
    if not keep.any():
        keep[:] = True
    jj, ii = np.nonzero(keep)
    pad = 2 * cell
    x0 = lo_x + ii.min() * step - pad
    x1 = lo_x + (ii.max() + 1) * step + pad
    y0 = lo_y + jj.min() * step - pad
    y1 = lo_y + (jj.max() + 1) * step + pad
    return x0, y0, x1, y1


def _snap(bbox, cell):
    x0, y0, x1, y1 = bbox
    gx0 = math.floor(x0 / cell) * cell
    gy0 = math.floor(y0 / cell) * cell
    nx = max(1, int(math.ceil((x1 - gx0) / cell - 1e-9)))
    ny = max(1, int(math.ceil((y1 - gy0) / cell - 1e-9)))
    return (gx0, gy0, gx0 + nx * cell, gy0 + ny * cell), nx, ny


def rasterize(roots, level: float | None = 1.0, bbox=None, cell: float = 0.01, *, log_level: float | None = None) -> LevelSetRaster:
    """Cell-center raster of ``{z : |prod_k (z - r_k)| <= level}``.

    ``bbox=None`` picks a safe box automatically. Pass ``log_level`` instead of
    ``level`` when the level under- or overflows a double.
    """
    log_level = _resolve_log_level(level, log_level)
    if not cell > 0:
        raise ParameterError("cell size must be positive")
    if bbox is None:
        bbox = auto_bbox(roots, cell, log_level=log_level)
    bbox, nx, ny = _snap(bbox, cell)
    if nx * ny > MAX_CELLS:
        area = (bbox[2] - bbox[0]) * (bbox[3] - bbox[1])
        raise ResolutionError(
            f"{nx}x{ny} cells exceed the {MAX_CELLS} cell guard; "
            f"use a cell of at least {math.sqrt(area / MAX_CELLS):.3g}"
        )
    rr, ri = _split(roots)
    xs = bbox[0] + (np.arange(nx) + 0.5) * cell
    ys = bbox[1] + (np.arange(ny) + 0.5) * cell
    mask = np.empty((ny, nx), dtype=bool)
    buf = np.empty((min(_ROW_CHUNK, ny), nx))
    for s in range(0, ny, _ROW_CHUNK):
        rows = ys[s : s + _ROW_CHUNK]
        out = buf[: len(rows)]
        _kernels.log_abs_grid(xs, rows, rr, ri, out)
        mask[s : s + len(rows)] = out <= log_level
    return LevelSetRaster(bbox=bbox, nx=nx, ny=ny, cell=cell, mask=mask, log_level=log_level)


def boundary_cells(mask: np.ndarray) -> np.ndarray:
    """True cells with a false 4-neighbor or on the raster edge."""
    interior = ndimage.binary_erosion(mask, structure=_CROSS, border_value=0)
    return mask & ~interior


def label_components(raster: LevelSetRaster) -> ComponentReport:
    """4-connected components with hull diameters of their boundary cells."""
    labels, n = ndimage.label(raster.mask, structure=_CROSS)
    if n == 0:
        return ComponentReport([], raster.cell, labels)
    counts = np.bincount(labels.ravel(), minlength=n + 1)
    edge = boundary_cells(raster.mask)
    jj, ii = np.nonzero(edge)
    lab = labels[jj, ii]
    order = np.argsort(lab, kind="stable")
    jj, ii, lab = jj[order], ii[order], lab[order]
    starts = np.searchsorted(lab, np.arange(1, n + 2))
    half = raster.cell / 2
    comps = []
    for k in range(1, n + 1):
        sj = jj[starts[k - 1] : starts[k]]
        si = ii[starts[k - 1] : starts[k]]
        pts = raster.centers(sj, si)
        box = (
            float(pts.real.min() - half),
            float(pts.imag.min() - half),
            float(pts.real.max() + half),
            float(pts.imag.max() + half),
        )
        comps.append(Component(id=k, cells=int(counts[k]), diameter=set_diameter(pts), bbox=box))
    return ComponentReport(comps, raster.cell, labels)


def check_claim(report: ComponentReport, n: int, c_min: float) -> Verdict:
    """PASS iff at least ``n`` components reach ``c_min`` within one
    cell-diagonal of measurement error."""
    diam = report.diameters
    slack = report.diameter_error
    big = [d for d in diam if d + slack >= c_min]
    return Verdict(len(big) >= n, int(n), float(c_min), diam[: max(int(n), 0)])


def polya_projection(raster: LevelSetRaster, direction: complex) -> float:
    """Total length of the projection of the true cells onto a line.

    Each cell center projects to an interval of width ``cell``; overlapping
    intervals are merged.
    """
    u = complex(direction)
    if abs(abs(u) - 1.0) > 1e-9:
        raise ParameterError("projection direction must be a unit complex number")
    z = raster.true_centers()
    if len(z) == 0:
        return 0.0
    t = np.sort((z * np.conj(u)).real)
    w = raster.cell
    gaps = np.flatnonzero(np.diff(t) > w)
    run_start = np.concatenate([[0], gaps + 1])
    run_end = np.concatenate([gaps, [len(t) - 1]])
    return float(np.sum(t[run_end] - t[run_start] + w))


def polya_directions(k: int = 16) -> np.ndarray:
    """``k`` fixed unit directions spread over a half-turn."""
    return np.exp(1j * np.pi * np.arange(k) / k)


def containment_check(raster: LevelSetRaster, strips, eps: float, c: float) -> int:
    """Number of true cells farther than ``eps`` from every strip, or outside
    the capacity-one ellipse (each cell counted once)."""
    return sum(containment_breakdown(raster, strips, eps, c)[2:])


def containment_breakdown(raster: LevelSetRaster, strips, eps: float, c: float):
    """``(far_from_strips, outside_ellipse, far_only, outside_any)`` counts;
    ``far_only + outside_any`` is the union."""
    z = raster.true_centers()
    if len(z) == 0:
        return 0, 0, 0, 0
    curves = [s.outline if hasattr(s, "outline") else s for s in getattr(strips, "strips", strips)]
    dist = np.full(len(z), np.inf)
    for curve in curves:
        box = _curve_box(curve, eps)
        near = (z.real >= box[0]) & (z.real <= box[2]) & (z.imag >= box[1]) & (z.imag <= box[3])
        idx = np.flatnonzero(near)
        if len(idx) == 0:
            continue
        inside = points_in_curve(curve, z[idx])
        d = np.zeros(len(idx))
        out = ~inside
        if out.any():
            d[out] = distance_to_curve(curve, z[idx[out]])
        dist[idx] = np.minimum(dist[idx], d)
    far = dist > eps
    outside = ~omega_contains(c, z, 0.0)
    return int(far.sum()), int(outside.sum()), int((far & ~outside).sum()), int(outside.sum())


def _curve_box(curve: ClosedCurve, pad: float):
    v = curve.vertices
    return v.real.min() - pad, v.imag.min() - pad, v.real.max() + pad, v.imag.max() + pad
