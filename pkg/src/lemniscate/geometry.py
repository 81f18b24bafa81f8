"""Planar primitives: closed polylines, containment, diameters, distances.

Points are complex numbers throughout (``numpy.complex128`` arrays).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError

EDGE_TOL = 1e-12
BRUTE_FORCE_BELOW = 32
_CHUNK = 4096


def _as_points(points) -> np.ndarray:
    return np.atleast_1d(np.asarray(points, dtype=np.complex128)).ravel()


def _cross(u, v):
    return u.real * v.imag - u.imag * v.real


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area; positive for counterclockwise vertex order."""
    v = _as_points(vertices)
    w = np.roll(v, -1)
    return 0.5 * float(np.sum(_cross(v, w)))


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """A simple, counterclockwise polygon; the last vertex joins the first.

    Construction checks the cheap invariants (vertex count, distinct
    consecutive vertices, positive area). Simplicity is O(n^2) and is checked
    by :meth:`is_simple` on demand.
    """

    vertices: np.ndarray
    degenerate: bool = field(default=False, repr=False)

    def __post_init__(self):
        v = _as_points(self.vertices)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if self.degenerate:
            return
        if len(v) < 3:
            raise UsageError("a closed curve needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise UsageError("curve vertices must be finite")
        if np.any(np.abs(np.roll(v, -1) - v) == 0.0):
            raise UsageError("consecutive curve vertices must be distinct")
        if signed_area(v) <= 0.0:
            raise UsageError("curve must be counterclockwise with positive area")

    @classmethod
    def flat_segment(cls, a: complex, b: complex, m: int = 2) -> "ClosedCurve":
        """The segment [a, b] traversed out and back, as a zero-area loop.

        Only boundary sampling accepts these; they are not Jordan curves.
        """
        t = np.linspace(0.0, 1.0, m + 1)
        out = a + (b - a) * t
        back = out[-2:0:-1]
        return cls(np.concatenate([out, back]), degenerate=True)

    def __len__(self):
        return len(self.vertices)

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1)

    @property
    def length(self) -> float:
        a, b = self.edges
        return float(np.sum(np.abs(b - a)))

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def is_simple(self) -> bool:
        a0, a1 = self.edges
        n = len(a0)
        for i in range(n):
            # edges i and i+1 share a vertex; skip adjacent pairs
            js = np.arange(i + 2, n)
            if i == 0:
                js = js[js != n - 1]
            if len(js) == 0:
                continue
            if np.any(_segments_cross(a0[i], a1[i], a0[js], a1[js])):
                return False
        return True

    def translated(self, shift: complex) -> "ClosedCurve":
        return ClosedCurve(self.vertices + shift, degenerate=self.degenerate)

    def scaled(self, factor: float) -> "ClosedCurve":
        if factor <= 0:
            raise UsageError("scale factor must be positive")
        return ClosedCurve(self.vertices * factor, degenerate=self.degenerate)


def _segments_cross(p0, p1, q0, q1) -> np.ndarray:
    """True where segment p0p1 meets q0q1 (touching counts)."""
    d1 = _cross(p1 - p0, q0 - p0)
    d2 = _cross(p1 - p0, q1 - p0)
    d3 = _cross(q1 - q0, p0 - q0)
    d4 = _cross(q1 - q0, p1 - q0)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = (
        (point_segment_distance(q0, p0, p1) <= EDGE_TOL)
        | (point_segment_distance(q1, p0, p1) <= EDGE_TOL)
        | (point_segment_distance(p0, q0, q1) <= EDGE_TOL)
        | (point_segment_distance(p1, q0, q1) <= EDGE_TOL)
    )
    return proper | touch


def point_segment_distance(p, s0, s1):
    """Distance from p to the closed segment [s0, s1]; broadcasts."""
    d = s1 - s0
    dd = d.real * d.real + d.imag * d.imag
    with np.errstate(invalid="ignore", divide="ignore"):
        t = ((p - s0) * np.conj(d)).real / dd
    t = np.where(dd > 0, np.clip(t, 0.0, 1.0), 0.0)
    return np.abs(p - (s0 + t * d))


def distance_to_curve(curve: ClosedCurve, z) -> np.ndarray:
    """Distance from each point to the polyline of ``curve`` (not its interior)."""
    z = _as_points(z)
    a, b = curve.edges
    out = np.empty(len(z))
    for s in range(0, len(z), _CHUNK):
        zc = z[s : s + _CHUNK, None]
        out[s : s + _CHUNK] = point_segment_distance(zc, a[None, :], b[None, :]).min(axis=1)
    return out


def points_in_curve(curve: ClosedCurve, z) -> np.ndarray:
    """Vectorized :func:`point_in_curve`."""
    z = _as_points(z)
    a, b = curve.edges
    x0, y0, x1, y1 = a.real, a.imag, b.real, b.imag
    out = np.empty(len(z), dtype=bool)
    for s in range(0, len(z), _CHUNK):
        zc = z[s : s + _CHUNK]
        x = zc.real[:, None]
        y = zc.imag[:, None]
        straddle = (y0 > y) != (y1 > y)
        with np.errstate(invalid="ignore", divide="ignore"):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        crossings = np.count_nonzero(straddle & (x < xi), axis=1)
        inside = crossings % 2 == 1
        near = point_segment_distance(zc[:, None], a[None, :], b[None, :]).min(axis=1) <= EDGE_TOL
        out[s : s + _CHUNK] = inside | near
    return out


def point_in_curve(curve: ClosedCurve, z: complex) -> bool:
    """Even-odd containment; points within 1e-12 of an edge count as inside."""
    return bool(points_in_curve(curve, z)[0])


def convex_hull(points) -> np.ndarray:
    """Andrew's monotone chain. Returns hull vertices counterclockwise,
    collinear points dropped."""
    p = np.unique(_as_points(points))  # sorts by real, then imag
    if len(p) <= 2:
        return p
    xs = p.real.tolist()
    ys = p.imag.tolist()

    def half(order):
        chain = []
        for k in order:
            while len(chain) >= 2:
                i, j = chain[-2], chain[-1]
                if (xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(k)
        return chain

    n = len(p)
    lower = half(range(n))
    upper = half(range(n - 1, -1, -1))
    idx = lower[:-1] + upper[:-1]
    return p[idx]


def _brute_diameter(p: np.ndarray) -> float:
    best = 0.0
    for s in range(0, len(p), _CHUNK):
        best = max(best, float(np.abs(p[s : s + _CHUNK, None] - p[None, :]).max()))
    return best


def _caliper_diameter(h: np.ndarray) -> float:
    n = len(h)
    if n == 1:
        return 0.0
    if n == 2:
        return float(abs(h[0] - h[1]))
    hx = h.real.tolist()
    hy = h.imag.tolist()

    def area2(i, j, k):
        return (hx[j] - hx[i]) * (hy[k] - hy[i]) - (hy[j] - hy[i]) * (hx[k] - hx[i])

    def dist(i, j):
        return ((hx[i] - hx[j]) ** 2 + (hy[i] - hy[j]) ** 2) ** 0.5

    best = 0.0
    j = 1
    for i in range(n):
        i1 = (i + 1) % n
        while area2(i, i1, (j + 1) % n) > area2(i, i1, j):
            j = (j + 1) % n
        j1 = (j + 1) % n
        best = max(best, dist(i, j), dist(i1, j), dist(i, j1), dist(i1, j1))
    return best


def set_diameter(points) -> float:
    """Largest pairwise distance of a finite point set."""
    p = _as_points(points)
    if len(p) == 0:
        raise UsageError("diameter of an empty point set")
    if len(p) < BRUTE_FORCE_BELOW:
        return _brute_diameter(p)
    return _caliper_diameter(convex_hull(p))


def curve_separation(a: ClosedCurve, b: ClosedCurve) -> float:
    """Minimum distance between the polylines of two curves (0 if they meet)."""
    a0, a1 = a.edges
    b0, b1 = b.edges
    best = np.inf
    for s in range(0, len(a0), 512):
        p0 = a0[s : s + 512, None]
        p1 = a1[s : s + 512, None]
        q0 = b0[None, :]
        q1 = b1[None, :]
        d1 = _cross(p1 - p0, q0 - p0)
        d2 = _cross(p1 - p0, q1 - p0)
        d3 = _cross(q1 - q0, p0 - q0)
        d4 = _cross(q1 - q0, p1 - q0)
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return 0.0
        d = np.minimum(
            np.minimum(point_segment_distance(q0, p0, p1), point_segment_distance(q1, p0, p1)),
            np.minimum(point_segment_distance(p0, q0, q1), point_segment_distance(p1, q0, q1)),
        )
        best = min(best, float(d.min()))
    return best


def resample_by_arc_length(curves, m: int) -> np.ndarray:
    """``m`` points spread over the curves in proportion to their lengths,
    uniform in arc length on each curve and starting at its first vertex."""
    curves = list(curves)
    if m < len(curves):
        raise UsageError("need at least one sample per curve")
    lengths = np.array([c.length for c in curves])
    share = m * lengths / lengths.sum()
    counts = np.floor(share).astype(int)
    # largest remainder, ties to the earlier curve
    rest = m - counts.sum()
    order = np.argsort(-(share - counts), kind="stable")
    counts[order[:rest]] += 1
    counts = np.maximum(counts, 1)
    out = []
    for curve, k in zip(curves, counts):
        a, b = curve.edges
        seg = np.abs(b - a)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        t = np.arange(k) * (cum[-1] / k)
        e = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(seg) - 1)
        f = (t - cum[e]) / seg[e]
        out.append(a[e] + f * (b[e] - a[e]))
    return np.concatenate(out)
