"""The shifted Joukowski map and the capacity-one ellipse it produces.

For 0 < c < 4 the map ``phi(z) = (c/4)(z + 1/z + 2)`` sends the circle
``|z| = 4/c`` onto an ellipse with foci 0 and c, center c/2 and semi-axes
``1 + c^2/16`` and ``1 - c^2/16``. The ellipse contains the segment [0, c]
and has logarithmic capacity exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, UsageError
from .geometry import ClosedCurve


def check_c(c: float) -> float:
    c = float(c)
    if not (0.0 < c < 4.0) or not np.isfinite(c):
        raise ParameterError(f"c must lie in the open interval (0, 4), got {c}")
    return c


@dataclass(frozen=True)
class EllipseDomain:
    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", check_c(self.c))

    @property
    def center(self) -> float:
        return self.c / 2.0

    @property
    def a(self) -> float:
        """Semi-major axis (horizontal)."""
        return 1.0 + self.c * self.c / 16.0

    @property
    def b(self) -> float:
        """Semi-minor axis (vertical)."""
        return 1.0 - self.c * self.c / 16.0

    @property
    def focal_distance(self) -> float:
        return float(np.sqrt(self.a**2 - self.b**2))

    @property
    def diameter(self) -> float:
        return 2.0 * self.a

    def boundary(self, m: int = 256) -> ClosedCurve:
        return omega_boundary(self.c, m)

    def contains(self, z, margin: float = 0.0):
        return omega_contains(self.c, z, margin)

    def half_chord(self, y: float, margin: float = 0.0) -> float:
        """Half-width of the (shrunken) ellipse at height y; 0 outside."""
        a = self.a - margin
        b = self.b - margin
        if abs(y) >= b:
            return 0.0
        return float(a * np.sqrt(1.0 - (y / b) ** 2))


def joukowski_phi(z, c: float):
    """(c/4)(z + 1/z + 2); accepts scalars or arrays."""
    c = check_c(c)
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z == 0):
        raise DomainError("the Joukowski map has a pole at z = 0")
    out = (c / 4.0) * (z + 1.0 / z + 2.0)
    return complex(out) if out.ndim == 0 else out


def omega_boundary(c: float, m: int) -> ClosedCurve:
    """``m`` samples of the ellipse, uniform in the circle parameter theta."""
    c = check_c(c)
    if m < 16:
        raise UsageError("omega_boundary needs m >= 16")
    theta = 2.0 * np.pi * np.arange(m) / m
    a = 1.0 + c * c / 16.0
    b = 1.0 - c * c / 16.0
    return ClosedCurve(a * np.cos(theta) + c / 2.0 + 1j * b * np.sin(theta))


def omega_contains(c: float, z, margin: float = 0.0):
    """Membership in the ellipse shrunk by ``margin`` along both semi-axes."""
    dom = EllipseDomain(c)
    margin = float(margin)
    if margin < 0:
        raise ParameterError("margin must be non-negative")
    if margin >= dom.b:
        raise ParameterError(f"margin {margin} swallows the minor semi-axis {dom.b}")
    z = np.asarray(z, dtype=np.complex128)
    u = (z.real - dom.center) / (dom.a - margin)
    v = z.imag / (dom.b - margin)
    inside = u * u + v * v <= 1.0
    return bool(inside) if inside.ndim == 0 else inside


def omega_capacity(c: float) -> float:
    """Capacity of the ellipse, (a + b)/2; identically 1 on (0, 4)."""
    dom = EllipseDomain(c)
    return (dom.a + dom.b) / 2.0


def phi_leading_coefficient(c: float, radius: float = 1e6) -> float:
    """Numerical slope at infinity of ``z -> phi(4z/c)``.

    ``phi(4z/c) = z + c/2 + c^2/(16 z)``, so the difference quotient between
    two points on a large circle recovers the coefficient of z.
    """
    c = check_c(c)
    z1 = radius
    z2 = 2.0 * radius
    f1 = joukowski_phi(4.0 * z1 / c, c)
    f2 = joukowski_phi(4.0 * z2 / c, c)
    return float(abs((f2 - f1) / (z2 - z1)))
