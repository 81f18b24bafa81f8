"""Figure and raster export: SVG outlines and a plain-text bitmap."""

from __future__ import annotations

import numpy as np
from scipy import ndimage
from skimage import measure

from .errors import UsageError
from .verifier import LevelSetRaster


def component_contours(raster: LevelSetRaster, labels: np.ndarray) -> list[list[np.ndarray]]:
    """Marching-squares outlines (complex arrays) per component, in label order."""
    out = []
    for k, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            out.append([])
            continue
        sub = np.pad(labels[sl] == k, 1).astype(float)
        j0, i0 = sl[0].start - 1, sl[1].start - 1
        curves = []
        for rc in measure.find_contours(sub, 0.5):
            x = raster.bbox[0] + (rc[:, 1] + i0 + 0.5) * raster.cell
            y = raster.bbox[1] + (rc[:, 0] + j0 + 0.5) * raster.cell
            curves.append(x + 1j * y)
        out.append(curves)
    return out


def _path(z: np.ndarray, close: bool = True) -> str:
    pts = " L".join(f"{p.real:.6g},{p.imag:.6g}" for p in z)
    return f"M{pts}" + (" Z" if close else "")


class Figure:
    """Collects paths in world coordinates and writes one SVG."""

    def __init__(self):
        self.items = []
        self.lo = complex(np.inf, np.inf)
        self.hi = complex(-np.inf, -np.inf)

    def _grow(self, z):
        self.lo = complex(min(self.lo.real, z.real.min()), min(self.lo.imag, z.imag.min()))
        self.hi = complex(max(self.hi.real, z.real.max()), max(self.hi.imag, z.imag.max()))

    def add(self, z, stroke="black", fill="none", width=1.0, close=True, label=None):
        z = np.asarray(z, dtype=np.complex128)
        if len(z) < 2:
            return
        self._grow(z)
        attrs = f'stroke="{stroke}" fill="{fill}" stroke-width="{width}" vector-effect="non-scaling-stroke"'
        if label is not None:
            attrs += f' id="{label}"'
        self.items.append(f'<path d="{_path(z, close)}" {attrs}/>')

    def svg(self, size: int = 800) -> str:
        if not self.items:
            raise UsageError("nothing to draw")
        span = max(self.hi.real - self.lo.real, self.hi.imag - self.lo.imag) or 1.0
        pad = 0.03 * span
        x0, y0 = self.lo.real - pad, self.lo.imag - pad
        w = self.hi.real - self.lo.real + 2 * pad
        h = self.hi.imag - self.lo.imag + 2 * pad
        height = int(round(size * h / w))
        # flip y so the picture reads with the imaginary axis upward
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{height}" '
            f'viewBox="{x0:.6g} {-(y0 + h):.6g} {w:.6g} {h:.6g}">'
        )
        body = "\n".join(self.items)
        return f'{head}\n<g transform="scale(1,-1)">\n{body}\n</g>\n</svg>\n'

    def save(self, path, size: int = 800):
        with open(path, "w") as fh:
            fh.write(self.svg(size))


def add_components(fig: Figure, raster: LevelSetRaster, labels: np.ndarray, stroke="crimson", fill="none", prefix="component"):
    for k, curves in enumerate(component_contours(raster, labels), start=1):
        for m, z in enumerate(curves):
            fig.add(z, stroke=stroke, fill=fill, label=f"{prefix}-{k}-{m}")


def write_bitmap(raster: LevelSetRaster, path) -> None:
    """Header ``nx ny x0 y0 x1 y1 level`` then one 0/1 row per raster row,
    bottom row first."""
    x0, y0, x1, y1 = raster.bbox
    with open(path, "w") as fh:
        fh.write(f"{raster.nx} {raster.ny} {x0!r} {y0!r} {x1!r} {y1!r} {raster.level!r}\n")
        for row in raster.mask:
            fh.write("".join("1" if v else "0" for v in row) + "\n")


def read_bitmap(path) -> LevelSetRaster:
    with open(path) as fh:
        head = fh.readline().split()
        rows = [ln.strip() for ln in fh if ln.strip()]
    nx, ny = int(head[0]), int(head[1])
    x0, y0, x1, y1, level = map(float, head[2:7])
    mask = np.array([[ch == "1" for ch in r] for r in rows], dtype=bool).reshape(ny, nx)
    return LevelSetRaster((x0, y0, x1, y1), nx, ny, (x1 - x0) / nx, mask, float(np.log(level)))
