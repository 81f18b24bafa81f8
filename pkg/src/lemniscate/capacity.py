"""Logarithmic capacity: transfinite diameters over Leja points, and closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DegenerateInputError, ParameterError, UsageError
from .geometry import ClosedCurve, resample_by_arc_length

DUPLICATE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class LejaConfiguration:
    points: np.ndarray
    indices: np.ndarray
    candidate_pool_size: int
    source: str = ""

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    n_points: int
    method: str  # "transfinite-diameter" | "closed-form"


def transfinite_diameter(points) -> float:
    """``(prod_{i<j} |z_i - z_j|)^(2/(n(n-1)))`` evaluated as a log-sum."""
    z = np.atleast_1d(np.asarray(points, dtype=np.complex128)).ravel()
    n = len(z)
    if n < 2:
        raise UsageError("transfinite diameter needs at least two points")
    total, dmin = _kernels.pair_log_sum(np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag))
    if dmin < DUPLICATE_TOL:
        raise DegenerateInputError(f"points closer than {DUPLICATE_TOL:g} ({dmin:.3g})")
    return math.exp(2.0 * total / (n * (n - 1)))


def leja_select(candidates, n: int, source: str = "") -> LejaConfiguration:
    """Greedy Leja points: start at the largest modulus, then repeatedly take
    the candidate maximizing the sum of log-distances to those already taken.
    Ties resolve to the smaller candidate index."""
    c = np.atleast_1d(np.asarray(candidates, dtype=np.complex128)).ravel()
    n = int(n)
    if n < 1:
        raise UsageError("need n >= 1 Leja points")
    if n > len(c):
        raise UsageError(f"asked for {n} Leja points from a pool of {len(c)}")
    if len(np.unique(c)) != len(c):
        raise DegenerateInputError("Leja candidates must be distinct")
    idx = _kernels.leja_indices(np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag), n)
    return LejaConfiguration(points=c[idx], indices=idx, candidate_pool_size=len(c), source=source)


def candidate_pool(curves: Sequence[ClosedCurve], size: int) -> np.ndarray:
    """Arc-length-uniform samples with exact repeats removed (flattened
    segments revisit their own points), in first-seen order."""
    pts = resample_by_arc_length(curves, size)
    key = np.round(pts.real, 13) + 1j * np.round(pts.imag, 13)
    _, first = np.unique(key, return_index=True)
    return pts[np.sort(first)]


def estimate_capacity(boundary: Sequence[ClosedCurve], n: int, pool_factor: int = 16) -> CapacityEstimate:
    """Transfinite diameter of ``n`` Leja points drawn from the boundary."""
    if pool_factor < 8:
        raise UsageError("pool_factor must be at least 8")
    if isinstance(boundary, ClosedCurve):
        boundary = [boundary]
    pool = candidate_pool(boundary, pool_factor * n)
    conf = leja_select(pool, n, source=f"{len(boundary)} curve(s)")
    return CapacityEstimate(transfinite_diameter(conf.points), n, "transfinite-diameter")


def extrapolated_capacity(boundary: Sequence[ClosedCurve], n: int = 256, pool_factor: int = 16) -> float:
    """``2 d_n - d_{n/2}`` on a shared pool.

    Leja transfinite diameters approach the capacity from above with an error
    roughly proportional to 1/n; one Richardson step removes most of it.
    """
    if isinstance(boundary, ClosedCurve):
        boundary = [boundary]
    pool = candidate_pool(boundary, pool_factor * n)
    conf = leja_select(pool, n)
    full = transfinite_diameter(conf.points)
    half = transfinite_diameter(conf.points[: n // 2])
    return 2.0 * full - half


# closed-form shapes


@dataclass(frozen=True)
class Segment:
    length: float


@dataclass(frozen=True)
class Disk:
    radius: float


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float


@dataclass(frozen=True)
class Lemniscate:
    """``{z : |a_d z^d + ...| <= 1}``; pass ``log_leading`` when |a_d| would
    over- or underflow a double."""

    leading: complex | None = None
    degree: int = 1
    log_leading: float | None = field(default=None)


def closed_form_capacity(shape) -> float:
    match shape:
        case Segment(length=ell):
            if not ell > 0:
                raise ParameterError("segment length must be positive")
            return ell / 4.0
        case Disk(radius=r):
            if not r > 0:
                raise ParameterError("disk radius must be positive")
            return float(r)
        case Ellipse(a=a, b=b):
            if not (a > 0 and b >= 0):
                raise ParameterError("ellipse semi-axes must be positive")
            return (a + b) / 2.0
        case Lemniscate(leading=lead, degree=d, log_leading=log_lead):
            if int(d) != d or d <= 0:
                raise ParameterError("lemniscate degree must be a positive integer")
            if log_lead is None:
                if lead is None or lead == 0:
                    raise ParameterError("leading coefficient must be non-zero")
                log_lead = math.log(abs(lead))
            return math.exp(-log_lead / d)
        case _:
            raise UsageError(f"unknown shape descriptor {shape!r}")
