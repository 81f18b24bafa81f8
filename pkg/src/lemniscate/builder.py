"""Strip families inside the ellipse, Leja roots on their outlines, and the
degree-escalation loop that turns them into a verified monic lemniscate."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numba
import numpy as np

from . import _kernels
from .capacity import (
    Lemniscate,
    LejaConfiguration,
    candidate_pool,
    closed_form_capacity,
    estimate_capacity,
    extrapolated_capacity,
    leja_select,
)
from .domain import EllipseDomain, check_c, omega_boundary, omega_contains
from .errors import InfeasibleGeometryError, NonConvergenceError, ParameterError, UsageError
from .geometry import ClosedCurve, curve_separation, resample_by_arc_length, set_diameter
from .report import SynthesisReport
from .verifier import (
    check_claim,
    containment_breakdown,
    label_components,
    polya_directions,
    polya_projection,
    rasterize,
)

MIN_HALF_HEIGHT = 1e-4
CORNER_SEGMENTS = 8
COEFFICIENT_DEGREE_LIMIT = 64


def default_margin(c: float) -> float:
    """Clearance kept between the strips and the ellipse."""
    return min(0.02, 0.1 * EllipseDomain(c).b)


@dataclass(frozen=True, eq=False)
class Strip:
    centerline_y: float
    half_length: float
    half_height: float
    outline: ClosedCurve


@dataclass(frozen=True, eq=False)
class StripFamily:
    c: float
    c_target: float
    gap_fraction: float
    strips: tuple[Strip, ...]
    separation: float
    margin: float

    def __len__(self):
        return len(self.strips)

    @property
    def outlines(self) -> list[ClosedCurve]:
        return [s.outline for s in self.strips]

    @property
    def centers(self) -> np.ndarray:
        return np.array([self.c / 2 + 1j * s.centerline_y for s in self.strips])

    def descriptor(self) -> dict:
        return {
            "c": self.c,
            "strip_length": self.c_target,
            "gap_fraction": self.gap_fraction,
            "n_strips": len(self.strips),
            "centerlines": [s.centerline_y for s in self.strips],
            "half_length": self.strips[0].half_length,
            "half_height": self.strips[0].half_height,
            "separation": self.separation,
            "margin": self.margin,
        }


def rounded_rectangle(center: complex, half_length: float, half_height: float, corners: int = CORNER_SEGMENTS) -> ClosedCurve:
    """Rectangle with fully rounded ends: each corner is a quarter circle of
    radius ``half_height`` cut into ``corners`` segments."""
    r = half_height
    if not (0 < r <= half_length):
        raise ParameterError("need 0 < half_height <= half_length")
    cx = complex(center)
    right = cx + (half_length - r)
    left = cx - (half_length - r)
    t = np.linspace(0.0, np.pi / 2, corners + 1)
    arcs = [
        right + r * np.exp(1j * (t - np.pi / 2)),  # bottom right
        right + r * np.exp(1j * t),  # top right
        left + r * np.exp(1j * (t + np.pi / 2)),  # top left
        left + r * np.exp(1j * (t + np.pi)),  # bottom left
    ]
    v = np.concatenate(arcs)
    keep = np.abs(v - np.roll(v, 1)) > 1e-12 * max(1.0, half_length)
    return ClosedCurve(v[keep])


def _achieved_margin(c: float, points: np.ndarray) -> float:
    """Largest m with every point inside the ellipse shrunk by m (bisection)."""
    dom = EllipseDomain(c)
    lo, hi = 0.0, dom.b * (1 - 1e-12)
    if not np.all(omega_contains(c, points, 0.0)):
        return 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if np.all(omega_contains(c, points, mid)):
            lo = mid
        else:
            hi = mid
    return lo


def band_height(c: float, strip_length: float, margin: float) -> float:
    """Half-height of the widest horizontal band whose every chord of the
    shrunken ellipse is at least ``strip_length`` long."""
    dom = EllipseDomain(c)
    a, b = dom.a - margin, dom.b - margin
    u = strip_length / (2 * a)
    if u >= 1:
        return 0.0
    return b * math.sqrt(1 - u * u)


def build_strips(c: float, N: int, c_target: float, gap_fraction: float = 0.97, margin: float | None = None) -> StripFamily:
    """``N`` equal rounded strips of length ``c_target``, stacked at equal
    pitch across the band where the shrunken ellipse is wide enough.

    Each strip takes ``1 - gap_fraction`` of its pitch; the rest is gap.
    """
    c = check_c(c)
    N = int(N)
    if N < 1:
        raise UsageError("need at least one strip")
    if not 0 < gap_fraction < 1:
        raise ParameterError("gap_fraction must lie in (0, 1)")
    if not c_target > 0:
        raise ParameterError("strip length must be positive")
    dom = EllipseDomain(c)
    margin = default_margin(c) if margin is None else float(margin)
    if not 0 < margin < dom.b:
        raise ParameterError("margin must lie in (0, b)")
    if c_target >= 2 * (dom.a - margin):
        raise InfeasibleGeometryError(
            f"strip length {c_target} does not fit: the ellipse chord is at most {2 * (dom.a - margin):.6g} after the margin"
        )
    y_max = band_height(c, c_target, margin)
    if y_max <= 0:
        raise InfeasibleGeometryError("no band of the ellipse is wide enough for the strips")
    pitch = 2 * y_max / N
    half_height = (1 - gap_fraction) * pitch / 2
    if half_height < MIN_HALF_HEIGHT:
        raise InfeasibleGeometryError(f"per-strip half-height {half_height:.3g} is below {MIN_HALF_HEIGHT:g}")
    half_length = c_target / 2
    half_height = min(half_height, half_length)  # short fat strips become disks
    strips = []
    for k in range(N):
        y = -y_max + (k + 0.5) * pitch
        outline = rounded_rectangle(c / 2 + 1j * y, half_length, half_height)
        strips.append(Strip(float(y), half_length, half_height, outline))
    verts = np.concatenate([s.outline.vertices for s in strips])
    achieved = _achieved_margin(c, verts)
    if achieved <= 0:
        raise InfeasibleGeometryError("strip outlines leave the ellipse")
    if N > 1:
        sep = min(
            curve_separation(strips[i].outline, strips[j].outline) for i in range(N) for j in range(i + 1, N)
        )
    else:
        sep = 2 * achieved  # no pairs; keep eps = sep/2 within the margin
    if sep <= 0:
        raise InfeasibleGeometryError("strips touch")
    return StripFamily(c, float(c_target), float(gap_fraction), tuple(strips), float(sep), float(achieved))


def _outlines(strips) -> list[ClosedCurve]:
    if isinstance(strips, StripFamily):
        return strips.outlines
    if isinstance(strips, ClosedCurve):
        return [strips]
    return [s.outline if isinstance(s, Strip) else s for s in strips]


def fekete_roots(strips, d: int, pool_factor: int = 16) -> LejaConfiguration:
    """``d`` Leja points from ``pool_factor * d`` arc-length samples of the outlines."""
    curves = _outlines(strips)
    d = int(d)
    if d < len(curves):
        raise UsageError(f"degree {d} is below the number of strips {len(curves)}")
    if pool_factor < 8:
        raise UsageError("pool_factor must be at least 8")
    pool = candidate_pool(curves, pool_factor * d)
    return leja_select(pool, d, source=f"{len(curves)} strip outline(s)")


def _root_array(roots) -> np.ndarray:
    if isinstance(roots, LejaConfiguration):
        roots = roots.points
    return np.atleast_1d(np.asarray(roots, dtype=np.complex128)).ravel()


def log_sup_norm(roots, strips, refinement: int = 10, samples: int | None = None) -> float:
    """log of the max of ``prod |z - zeta_k|`` over outline samples.

    The sample count is ``refinement`` times the candidate pool when the
    roots came from :func:`fekete_roots`; pass ``samples`` to override.
    """
    if refinement < 4:
        raise UsageError("refinement must be at least 4")
    r = _root_array(roots)
    if samples is None:
        pool = roots.candidate_pool_size if isinstance(roots, LejaConfiguration) else 16 * len(r)
        samples = refinement * pool
    z = resample_by_arc_length(_outlines(strips), int(samples))
    vals = _kernels.log_abs_many(
        np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag), np.ascontiguousarray(r.real), np.ascontiguousarray(r.imag)
    )
    return float(vals.max())


def sup_norm(roots, strips, refinement: int = 10, samples: int | None = None) -> float:
    """``exp(log_sup_norm)``; underflows to 0 for high degree, so the
    pipeline itself stays in log form."""
    return math.exp(log_sup_norm(roots, strips, refinement, samples))


def monic_residual(roots, factor: float = 1e3) -> float:
    """``|p(z)/z^d - 1|`` at ``z = factor * max|root|`` from the product
    ``prod (1 - r_k/z)``."""
    r = _root_array(roots)
    R = float(np.abs(r).max())
    z = factor * (R if R > 0 else 1.0)
    s = np.sum(np.log1p(-r / z))
    return float(abs(np.exp(s) - 1.0))


@dataclass(frozen=True, eq=False)
class MonicLemniscatePolynomial:
    """``p(z) = prod_k (z - roots[k])``, kept in root-product form."""

    degree: int
    roots: np.ndarray
    log_M: float
    w: float
    provenance: dict = field(default_factory=dict)
    M: float | None = None  # derived from log_M when omitted

    def __post_init__(self):
        if self.M is None:
            object.__setattr__(self, "M", _safe_exp(self.log_M))

    def log_abs(self, z):
        from .verifier import log_abs_eval

        return log_abs_eval(self.roots, z)

    def coefficients(self) -> np.ndarray:
        """Coefficients, highest power first; refused above degree 64."""
        if self.degree > COEFFICIENT_DEGREE_LIMIT:
            raise UsageError(f"coefficient expansion is limited to degree {COEFFICIENT_DEGREE_LIMIT}")
        return np.poly(self.roots)

    def monic_residual(self, factor: float = 1e3) -> float:
        return monic_residual(self.roots, factor)

    # text round trip

    def to_text(self) -> str:
        lines = [
            "monic-lemniscate-polynomial",
            f"degree {self.degree}",
            f"scale {_fmt(self.w)}",
            f"sup_norm {_fmt(self.M)}",
            f"log_sup_norm {_fmt(self.log_M)}",
            f"provenance {json.dumps(self.provenance, sort_keys=True)}",
            "roots",
        ]
        lines += [f"{_fmt(z.real)} {_fmt(z.imag)}" for z in self.roots]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MonicLemniscatePolynomial":
        lines = text.splitlines()
        if not lines or lines[0].strip() != "monic-lemniscate-polynomial":
            raise UsageError("not a polynomial file")
        head = {}
        k = 1
        while k < len(lines) and lines[k].strip() != "roots":
            key, _, val = lines[k].partition(" ")
            head[key] = val
            k += 1
        try:
            d = int(head["degree"])
            body = [ln.split() for ln in lines[k + 1 :] if ln.strip()]
            roots = np.array([float(a) + 1j * float(b) for a, b in body], dtype=np.complex128)
            poly = cls(
                degree=d,
                roots=roots,
                log_M=float(head["log_sup_norm"]),
                w=float(head["scale"]),
                provenance=json.loads(head.get("provenance", "{}")),
                M=float(head["sup_norm"]),
            )
        except (KeyError, ValueError) as exc:
            raise UsageError(f"malformed polynomial file: {exc}") from exc
        if len(roots) != d:
            raise UsageError(f"polynomial file lists {len(roots)} roots for degree {d}")
        return poly


def _fmt(x: float) -> str:
    return "%.17g" % x


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def monicize(roots, M: float | None = None, *, log_M: float | None = None, provenance: dict | None = None) -> MonicLemniscatePolynomial:
    """Scale roots by ``w = M^(-1/d)`` so ``prod (z - w zeta_k) = q(z/w)/M``."""
    r = _root_array(roots)
    d = len(r)
    if d < 1:
        raise UsageError("need at least one root")
    if log_M is None:
        if M is None or not M > 0:
            raise ParameterError("sup-norm M must be positive")
        log_M = math.log(M)
    else:
        M = None
    w = _safe_exp(-log_M / d)
    return MonicLemniscatePolynomial(d, w * r, float(log_M), w, dict(provenance or {}), M)


# synthesis


@dataclass(frozen=True)
class SynthesisConfig:
    c_target: float | None = None  # final diameter goal; default 0.92 c
    d_start: int | None = None  # default 32 N
    d_max: int = 8192
    cell: float | None = None  # default min(0.005, separation/4)
    epsilon: float | None = None  # default separation/2
    pool_factor: int = 16
    refinement: int = 10
    gap_fraction: float = 0.97
    strip_length: float | None = None  # default: sized from capacity estimates
    margin: float | None = None
    design_slack: float = 0.01
    seed: int = 0

    def degree_schedule(self, N: int) -> list[int]:
        d = int(self.d_start) if self.d_start is not None else 32 * N
        if d < N:
            raise ParameterError("d_start must be at least N")
        if self.d_max < d:
            raise ParameterError("d_max must be at least d_start")
        out = []
        while d < self.d_max:
            out.append(d)
            d *= 2
        out.append(int(self.d_max))
        return out


def default_c_target(c: float) -> float:
    return 0.92 * c


def design_strip_length(c: float, N: int, goal: float, gap_fraction: float, margin: float, n: int = 256) -> tuple[float, float]:
    """Shortest strip length whose family reaches ``length / Cap >= goal``.

    Monicization scales everything by about ``1/Cap``, so short strips with
    wide gaps still end up long; wide gaps are what let high-degree
    lemniscates split between strips. Returns ``(length, ratio)``; if even
    the longest feasible strip misses the goal, that strip is returned.
    """
    dom = EllipseDomain(c)
    a, b = dom.a - margin, dom.b - margin
    y_min = N * MIN_HALF_HEIGHT / (1 - gap_fraction) * 1.000001
    if y_min >= b:
        raise InfeasibleGeometryError("the ellipse is too thin for the requested strips")
    hi = 2 * a * math.sqrt(1 - (y_min / b) ** 2) * (1 - 1e-9)

    def ratio(ell):
        fam = build_strips(c, N, ell, gap_fraction, margin)
        return ell / extrapolated_capacity(fam.outlines, n)

    r_hi = ratio(hi)
    if r_hi < goal:
        return hi, r_hi
    lo = 0.25 * hi
    r_lo = ratio(lo)
    if r_lo >= goal:
        return lo, r_lo
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        r = ratio(mid)
        if r >= goal:
            hi, r_hi = mid, r
        else:
            lo = mid
    return hi, r_hi


def _strip_labels(raster, labels, points) -> list[int]:
    x0, y0 = raster.bbox[0], raster.bbox[1]
    out = []
    for z in points:
        i = int(math.floor((z.real - x0) / raster.cell))
        j = int(math.floor((z.imag - y0) / raster.cell))
        inside = 0 <= i < raster.nx and 0 <= j < raster.ny
        out.append(int(labels[j, i]) if inside else 0)
    return out


def _component_for(labels_at, report) -> list:
    by_id = {c.id: c for c in report.components}
    return [by_id.get(k) for k in labels_at]


def _directions(seed: int, k: int = 16) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.concatenate([polya_directions(k), np.exp(1j * rng.uniform(0, np.pi, k))])


def _analyse(poly, q_raster, q_report, family, cell, seed):
    """Rasterize the monic polynomial and collect the final checks."""
    p_raster = rasterize(poly.roots, 1.0, cell=cell)
    p_report = label_components(p_raster)
    centers = family.centers
    q_comps = _component_for(_strip_labels(q_raster, q_report.labels, centers), q_report)
    p_comps = _component_for(_strip_labels(p_raster, p_report.labels, poly.w * centers), p_report)
    dev = 0.0
    for qc, pc in zip(q_comps, p_comps):
        if qc is None or pc is None:
            dev = math.inf
            break
        dev = max(dev, abs(pc.diameter - poly.w * qc.diameter))
    polya = max(polya_projection(p_raster, u) for u in _directions(seed))
    return p_raster, p_report, dev, polya


def synthesize(c: float, N: int, config: SynthesisConfig | None = None, log=None):
    """Escalate the degree until the normalized Leja polynomial's unit
    sublevel set hugs the strips, then monicize and verify the claim.

    Returns ``(polynomial, report)``; raises :class:`NonConvergenceError`
    (carrying both) when the schedule runs out.
    """
    t_total = time.perf_counter()
    c = check_c(c)
    N = int(N)
    if N < 1:
        raise UsageError("N must be at least 1")
    cfg = config or SynthesisConfig()
    c_target = cfg.c_target if cfg.c_target is not None else default_c_target(c)
    if not c_target > 0:
        raise ParameterError("c_target must be positive")
    if cfg.pool_factor < 8:
        raise UsageError("pool_factor must be at least 8")
    if cfg.refinement < 4:
        raise UsageError("refinement must be at least 4")
    schedule = cfg.degree_schedule(N)
    margin = cfg.margin if cfg.margin is not None else default_margin(c)
    say = log or (lambda msg: None)

    timings = {"threads": numba.get_num_threads()}
    t0 = time.perf_counter()
    design_ratio = None
    if cfg.strip_length is not None:
        strip_length = float(cfg.strip_length)
    elif N == 1:
        strip_length = min(c_target, 2 * (EllipseDomain(c).a - margin) * 0.99)
    else:
        goal = c_target * (1 + cfg.design_slack)
        strip_length, design_ratio = design_strip_length(c, N, goal, cfg.gap_fraction, margin)
    family = build_strips(c, N, strip_length, cfg.gap_fraction, margin)
    timings["strips"] = time.perf_counter() - t0
    delta = family.separation
    eps = cfg.epsilon if cfg.epsilon is not None else delta / 2
    cell = min(cfg.cell if cfg.cell is not None else 0.005, delta / 4)
    if not (eps > 0 and cell > 0):
        raise ParameterError("epsilon and cell must be positive")
    say(f"strips: N={N} length={strip_length:.6g} separation={delta:.4g} cell={cell:.4g} eps={eps:.4g}")

    echo = {
        "c": c,
        "N": N,
        "c_target": c_target,
        "d_schedule": schedule,
        "cell": cell,
        "epsilon": eps,
        "pool_factor": cfg.pool_factor,
        "refinement": cfg.refinement,
        "gap_fraction": cfg.gap_fraction,
        "margin": margin,
        "strip_length": strip_length,
        "design_ratio": design_ratio,
        "seed": cfg.seed,
        "strips": family.descriptor(),
    }
    attempts = []
    stage_times = []
    poly = None
    final = None
    for d in schedule:
        tt = {"d": d}
        t0 = time.perf_counter()
        roots = fekete_roots(family, d, cfg.pool_factor)
        tt["leja"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        log_M = log_sup_norm(roots, family, cfg.refinement)
        tt["sup_norm"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        q_raster = rasterize(roots.points, log_level=log_M, cell=cell)
        q_report = label_components(q_raster)
        far, outside, far_only, out_any = containment_breakdown(q_raster, family, eps, c)
        violations = far_only + out_any
        labels_at = _strip_labels(q_raster, q_report.labels, family.centers)
        separated = all(labels_at) and len(set(labels_at)) == N
        tt["raster"] = time.perf_counter() - t0
        w = _safe_exp(-log_M / d)
        att = {
            "d": d,
            "M": _safe_exp(log_M),
            "log_M": log_M,
            "w": w,
            "containment_violations": violations,
            "n_components": q_report.n_components,
            "strips_separated": separated,
        }
        ok = violations == 0 and log_M <= 0 and q_report.n_components >= N and separated
        prov = {"strips": family.descriptor(), "d": d, "pool_factor": cfg.pool_factor, "refinement": cfg.refinement}
        poly = monicize(roots, log_M=log_M, provenance=prov)
        if ok:
            t0 = time.perf_counter()
            p_raster, p_report, dev, polya = _analyse(poly, q_raster, q_report, family, cell, cfg.seed)
            verdict = check_claim(p_report, N, c_target)
            tt["verify"] = time.perf_counter() - t0
            att["verdict"] = verdict.label
            final = (poly, q_raster, q_report, p_raster, p_report, dev, polya, verdict, violations)
        say(
            f"d={d}: log M={log_M:.6g} w={w:.6g} violations={violations} "
            f"components={q_report.n_components} separated={separated}" + (f" verdict={att['verdict']}" if ok else "")
        )
        attempts.append(att)
        stage_times.append(tt)
        if ok and final[7].passed:
            break

    converged = final is not None and final[7].passed
    t0 = time.perf_counter()
    if final is None or final[0] is not poly:
        # diagnostics for the last attempt
        p_raster, p_report, dev, polya = _analyse(poly, q_raster, q_report, family, cell, cfg.seed)
        verdict = check_claim(p_report, N, c_target)
        final = (poly, q_raster, q_report, p_raster, p_report, dev, polya, verdict, violations)
    poly, q_raster, q_report, p_raster, p_report, dev, polya, verdict, violations = final
    checks = {
        "monic_residual": poly.monic_residual(),
        "polya_max": polya,
        "cap_omega": estimate_capacity([omega_boundary(c, 1024)], 128, 16).value,
        "cap_omega_n": estimate_capacity(family.outlines, 128, 16).value,
        "cap_lemniscate": closed_form_capacity(Lemniscate(log_leading=-poly.log_M, degree=poly.degree)),
        "containment_violations": violations,
        "scaling_deviation": dev,
        "pre_scaling_diameters": q_report.diameters[:N],
        "M_le_1": poly.log_M <= 0,
        "w_ge_1": poly.w >= 1,
    }
    timings["checks"] = time.perf_counter() - t0
    timings["attempts"] = stage_times
    timings["total"] = time.perf_counter() - t_total
    components = [
        {"id": k.id, "cells": k.cells, "diameter": k.diameter, "bbox": list(k.bbox)}
        for k in sorted(p_report.components, key=lambda k: (-k.cells, k.id))
    ]
    report = SynthesisReport(
        config=echo,
        attempts=attempts,
        polynomial={"degree": poly.degree, "M": poly.M, "log_M": poly.log_M, "w": poly.w, "roots_path": None},
        components=components,
        checks=checks,
        verdict=verdict.label if converged else "NON-CONVERGENCE",
        timings=timings,
        family=family,
        rasters=(q_raster, p_raster),
    )
    if not converged:
        raise NonConvergenceError(
            f"no degree up to {schedule[-1]} produced {N} separated components of diameter >= {c_target:.6g}",
            report=report,
            polynomial=poly,
        )
    return poly, report
