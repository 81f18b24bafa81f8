"""Command-line front end: construct, verify, zn-demo, capacity.

Exit codes: 0 verified PASS, 1 usage or parameter error, 2 non-convergence
or verification FAIL. Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numba
import numpy as np

from . import __version__
from .errors import InfeasibleGeometryError, LemniscateError, NonConvergenceError, UsageError

EXIT_PASS, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


@dataclass
class RunConfig:
    command: str = "construct"
    c: float | None = None
    N: int | None = None
    c_target: float | None = None
    d_start: int | None = None
    d_max: int | None = None
    cell: float | None = None
    epsilon: float | None = None
    pool_factor: int | None = None
    refinement: int | None = None
    level: float | None = None
    n: int | None = None
    out: str | None = None
    svg: str | None = None
    roots: str | None = None
    threads: int | None = None
    seed: int = 0

    @classmethod
    def merge(cls, command: str, file_values: dict, flag_values: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(file_values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        vals = {**file_values, **{k: v for k, v in flag_values.items() if v is not None and k in known}}
        vals["command"] = command
        return cls(**vals)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, *names):
    opts = {
        "c": dict(type=float, help="ellipse parameter in (0, 4)"),
        "N": dict(type=int, help="number of components"),
        "c-target": dict(type=float, help="required component diameter (default 0.92 c)"),
        "d-start": dict(type=int, help="first degree (default 32 N)"),
        "d-max": dict(type=int, help="last degree of the schedule (default 8192)"),
        "cell": dict(type=float, help="raster cell size"),
        "epsilon": dict(type=float, help="containment tolerance (default separation/2)"),
        "pool-factor": dict(type=int, help="Leja candidates per root (default 16)"),
        "refinement": dict(type=int, help="sup-norm samples per candidate (default 10)"),
        "level": dict(type=float, help="sublevel value"),
        "n": dict(type=int, help="degree (zn-demo) or point count (capacity)"),
        "out": dict(help="report JSON path"),
        "svg": dict(help="figure path"),
        "roots": dict(help="root file path"),
    }
    for name in names:
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), **opts[name])
    p.add_argument("--threads", type=int, help="worker threads (never changes results)")
    p.add_argument("--seed", type=int, help="seed for sampled test directions")
    p.add_argument("--config", help="JSON file of defaults; flags win")
    p.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lemniscate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("construct", help="build and verify a lemniscate with N large components")
    _common(p, "c", "N", "c-target", "d-start", "d-max", "cell", "epsilon", "pool-factor", "refinement", "out", "svg", "roots")

    p = sub.add_parser("verify", help="re-check a saved root file at a level")
    _common(p, "roots", "level", "cell", "N", "c-target", "out", "svg")

    p = sub.add_parser("zn-demo", help="components of |z^n - 1| <= level")
    _common(p, "n", "level", "cell", "out", "svg")

    p = sub.add_parser("capacity", help="closed-form or estimated logarithmic capacity")
    shape = p.add_mutually_exclusive_group(required=True)
    shape.add_argument("--segment", type=float, metavar="LENGTH")
    shape.add_argument("--disk", type=float, metavar="RADIUS")
    shape.add_argument("--ellipse", type=float, nargs=2, metavar=("A", "B"))
    shape.add_argument("--lemniscate", type=float, nargs=2, metavar=("LEADING", "DEGREE"))
    shape.add_argument("--omega", type=float, metavar="C", help="the capacity-one ellipse for parameter c")
    shape.add_argument("--points", metavar="FILE", help="JSON list of [re, im] pairs")
    _common(p, "n", "pool-factor")
    return parser


def _fail(exc: BaseException, code: int) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(err), file=sys.stderr)
    return code


def _say(args):
    if getattr(args, "verbose", False):
        return lambda msg: print(msg, file=sys.stderr, flush=True)
    return None


def _set_threads(n):
    if n is None:
        return
    if n < 1:
        raise UsageError("--threads must be at least 1")
    numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))


def _emit(doc: str, path: str | None):
    if path:
        Path(path).write_text(doc)
    else:
        sys.stdout.write(doc)


def _need(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


# commands


def cmd_construct(cfg: RunConfig, log=None) -> int:
    from .builder import SynthesisConfig, synthesize
    from .render import Figure, add_components
    from .domain import omega_boundary

    _need(cfg, "c", "N")
    opts = {k: getattr(cfg, k) for k in ("c_target", "d_start", "d_max", "cell", "epsilon", "pool_factor", "refinement")}
    scfg = SynthesisConfig(seed=cfg.seed, **{k: v for k, v in opts.items() if v is not None})
    roots_path = cfg.roots or (str(Path(cfg.out).with_suffix(".roots.txt")) if cfg.out else None)
    code = EXIT_PASS
    try:
        poly, report = synthesize(cfg.c, cfg.N, scfg, log=log)
    except NonConvergenceError as exc:
        poly, report = exc.polynomial, exc.report
        code = EXIT_FAIL
        _fail(exc, code)
    if roots_path and poly is not None:
        Path(roots_path).write_text(poly.to_text())
        report.polynomial["roots_path"] = roots_path
    report.config["run"] = {k: v for k, v in asdict(cfg).items() if k not in ("threads",)}
    _emit(report.to_json(), cfg.out)
    if cfg.svg:
        fig = Figure()
        fig.add(omega_boundary(cfg.c, 720).vertices, stroke="gray", label="omega")
        for k, curve in enumerate(report.family.outlines):
            fig.add(curve.vertices, stroke="steelblue", label=f"strip-{k}")
        q_raster, p_raster = report.rasters
        from .verifier import label_components

        add_components(fig, q_raster, label_components(q_raster).labels, stroke="darkorange", prefix="pre-scaling")
        add_components(fig, p_raster, label_components(p_raster).labels, stroke="crimson", prefix="component")
        fig.save(cfg.svg)
    if cfg.out:
        print(f"{report.verdict}: degree {report.polynomial['degree']}, w = {report.polynomial['w']:.6g}")
        for comp in report.components[: max(cfg.N, 1)]:
            print(f"  component {comp['id']}: diameter {comp['diameter']:.6f}")
    if code == EXIT_PASS and report.verdict != "PASS":
        code = EXIT_FAIL
    return code


def cmd_verify(cfg: RunConfig, log=None) -> int:
    from .builder import MonicLemniscatePolynomial
    from .verifier import check_claim, label_components, polya_directions, polya_projection, rasterize
    from .render import Figure, add_components

    _need(cfg, "roots")
    poly = MonicLemniscatePolynomial.from_text(Path(cfg.roots).read_text())
    level = 1.0 if cfg.level is None else cfg.level
    cell = 0.005 if cfg.cell is None else cfg.cell
    raster = rasterize(poly.roots, level, cell=cell)
    rep = label_components(raster)
    doc = {
        "roots_path": cfg.roots,
        "degree": poly.degree,
        "level": level,
        "cell": cell,
        "n_components": rep.n_components,
        "components": _component_rows(rep),
        "polya_max": max(polya_projection(raster, u) for u in polya_directions()),
        "monic_residual": poly.monic_residual(),
    }
    code = EXIT_PASS
    if cfg.N is not None:
        c_min = cfg.c_target if cfg.c_target is not None else 0.0
        verdict = check_claim(rep, cfg.N, c_min)
        doc["verdict"] = verdict.label
        code = EXIT_PASS if verdict.passed else EXIT_FAIL
    _emit(json.dumps(doc, indent=2) + "\n", cfg.out)
    if cfg.svg:
        fig = Figure()
        add_components(fig, raster, rep.labels)
        fig.save(cfg.svg)
    return code


def _component_rows(rep):
    comps = sorted(rep.components, key=lambda k: (-k.cells, k.id))
    return [{"id": k.id, "cells": k.cells, "diameter": k.diameter, "bbox": list(k.bbox)} for k in comps]


def zn_connectivity(n: int, level: float, cell: float) -> str:
    """Whether the pinch of ``|z^n - 1| = level`` at the origin is resolved.

    Near 0 the neck (level > 1) or gap (level < 1) has radius about
    ``|level - 1|^(1/n)``; below one cell the raster cannot tell.
    """
    if abs(level - 1.0) ** (1.0 / n) < cell * math.sqrt(2):
        return "indeterminate-at-resolution"
    return "determinate"


def cmd_zn_demo(cfg: RunConfig, log=None) -> int:
    from .verifier import label_components, polya_directions, polya_projection, rasterize
    from .render import Figure, add_components

    n = 7 if cfg.n is None else cfg.n
    level = 0.99999 if cfg.level is None else cfg.level
    cell = 0.001 if cfg.cell is None else cfg.cell
    if n < 2:
        raise UsageError("zn-demo needs n >= 2")
    if not level > 0:
        raise UsageError("level must be positive")
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    raster = rasterize(roots, level, cell=cell)
    rep = label_components(raster)
    doc = {
        "n": n,
        "level": level,
        "cell": cell,
        "bbox": list(raster.bbox),
        "n_components": rep.n_components,
        "connectivity": zn_connectivity(n, level, cell),
        "diameters": rep.diameters,
        "diameter_error": rep.diameter_error,
        "components": _component_rows(rep),
        "polya_max": max(polya_projection(raster, u) for u in polya_directions()),
    }
    print(f"{rep.n_components} component(s) ({doc['connectivity']})")
    for d in rep.diameters:
        print(f"  diameter {d:.6f} +/- {rep.diameter_error:.2g}")
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(doc, indent=2) + "\n")
    if cfg.svg:
        fig = Figure()
        fig.add(np.exp(2j * np.pi * np.arange(360) / 360), stroke="lightgray", label="unit-circle")
        add_components(fig, raster, rep.labels)
        fig.save(cfg.svg)
    return EXIT_PASS


def _load_points(path):
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("points", [])
    try:
        return np.array([complex(p[0], p[1]) for p in data])
    except (TypeError, IndexError, ValueError) as exc:
        raise UsageError(f"{path}: expected a list of [re, im] pairs") from exc


def cmd_capacity(args, cfg: RunConfig) -> int:
    from .capacity import Disk, Ellipse, Lemniscate, Segment, closed_form_capacity, estimate_capacity, leja_select, transfinite_diameter
    from .domain import omega_boundary, omega_capacity
    from .geometry import ClosedCurve

    n = 128 if cfg.n is None else cfg.n
    pf = 16 if cfg.pool_factor is None else cfg.pool_factor
    doc = {}
    circle = np.exp(2j * np.pi * np.arange(720) / 720)
    if args.segment is not None:
        shape, curve = Segment(args.segment), None
        if args.segment > 0:
            curve = ClosedCurve.flat_segment(-args.segment / 2, args.segment / 2, 64)
        doc["shape"] = "segment"
    elif args.disk is not None:
        shape = Disk(args.disk)
        curve = ClosedCurve(args.disk * circle) if args.disk > 0 else None
        doc["shape"] = "disk"
    elif args.ellipse is not None:
        a, b = args.ellipse
        shape = Ellipse(a, b)
        curve = ClosedCurve(a * circle.real + 1j * b * circle.imag) if a > 0 and b > 0 else None
        doc["shape"] = "ellipse"
    elif args.lemniscate is not None:
        lead, d = args.lemniscate
        if d != int(d):
            raise UsageError("lemniscate degree must be an integer")
        shape, curve = Lemniscate(lead, int(d)), None
        doc["shape"] = "lemniscate"
    elif args.omega is not None:
        curve = omega_boundary(args.omega, 1024)
        doc["shape"] = "omega"
        doc["closed_form"] = omega_capacity(args.omega)
        shape = None
    else:
        pts = _load_points(args.points)
        doc["shape"] = "points"
        m = min(n, len(pts))
        conf = leja_select(pts, m, source=args.points)
        doc["estimate"] = {"value": transfinite_diameter(conf.points), "n": m, "method": "transfinite-diameter"}
        shape = curve = None
    if shape is not None:
        doc["closed_form"] = closed_form_capacity(shape)
    if curve is not None:
        est = estimate_capacity([curve], n, pf)
        doc["estimate"] = {"value": est.value, "n": est.n_points, "method": est.method}
    doc["value"] = doc.get("closed_form", doc.get("estimate", {}).get("value"))
    doc["method"] = "closed-form" if "closed_form" in doc else "transfinite-diameter"
    print(json.dumps(doc))
    return EXIT_PASS


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        file_values = {}
        if getattr(args, "config", None):
            try:
                file_values = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
        cfg = RunConfig.merge(args.command, file_values, flags)
        _set_threads(cfg.threads)
        log = _say(args)
        if args.command == "construct":
            return cmd_construct(cfg, log)
        if args.command == "verify":
            return cmd_verify(cfg, log)
        if args.command == "zn-demo":
            return cmd_zn_demo(cfg, log)
        return cmd_capacity(args, cfg)
    except (UsageError, InfeasibleGeometryError, ValueError) as exc:
        return _fail(exc, EXIT_USAGE)
    except OSError as exc:
        return _fail(exc, EXIT_USAGE)
    except LemniscateError as exc:
        return _fail(exc, EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
