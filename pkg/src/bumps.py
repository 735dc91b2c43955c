"""
Smooth compactly supported test functions for white-noise pairings.

phi(x, y) = amplitude * b((x - cx) / rx) * b((y - cy) / ry),
b(u) = exp(-1 / (1 - u^2)) on |u| < 1 and 0 elsewhere.
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple, Union

import numpy as np

from .errors import DomainError
from .geometry import RectDomain
from .quadrature import composite_nodes


_PANELS = 64
_ORDER = 16


def bump_profile(u: np.ndarray) -> np.ndarray:
    """The one-dimensional profile b(u)."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) < 1.0
    safe = np.where(inside, u, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)


@dataclass(frozen=True)
class TestFunction:
    """Tensor-product bump centred at (cx, cy) with half-widths (rx, ry)."""
    __test__ = False

    center: Tuple[float, float]
    radius: Tuple[float, float]
    amplitude: float = 1.0

    def __post_init__(self):
        if self.radius[0] <= 0 or self.radius[1] <= 0:
            raise DomainError("Bump half-widths must be positive")

    @property
    def support(self) -> RectDomain:
        (cx, cy), (rx, ry) = self.center, self.radius
        return RectDomain(cx - rx, cx + rx, cy - ry, cy + ry)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        (cx, cy), (rx, ry) = self.center, self.radius
        return self.amplitude * bump_profile((np.asarray(x) - cx) / rx) * bump_profile((np.asarray(y) - cy) / ry)

    def axis_factor(self, axis: int, t: np.ndarray) -> np.ndarray:
        return bump_profile((t - self.center[axis]) / self.radius[axis])

    def require_inside_unit_square(self) -> None:
        s = self.support
        if not (s.x0 > 0.0 and s.y0 > 0.0 and s.x1 < 1.0 and s.y1 < 1.0):
            raise DomainError(f"Test function support {s} is not inside (0,1)^2")


def _axis_integral(f: TestFunction, g: Union[TestFunction, None], axis: int) -> float:
    lo = f.center[axis] - f.radius[axis]
    hi = f.center[axis] + f.radius[axis]
    if g is not None:
        lo = max(lo, g.center[axis] - g.radius[axis])
        hi = min(hi, g.center[axis] + g.radius[axis])
    if hi <= lo:
        return 0.0
    t, w = composite_nodes(lo, hi, _PANELS, _ORDER)
    values = f.axis_factor(axis, t)
    if g is not None:
        values = values * g.axis_factor(axis, t)
    return float(w @ values)


def bump_integral(f: TestFunction) -> float:
    """Integral of phi over the plane."""
    return f.amplitude * _axis_integral(f, None, 0) * _axis_integral(f, None, 1)


def bump_inner(f: TestFunction, g: TestFunction) -> float:
    """L^2 inner product of two bumps, by separable Gauss quadrature."""
    return f.amplitude * g.amplitude * _axis_integral(f, g, 0) * _axis_integral(f, g, 1)


def parse_bump(literal: Dict[str, Any]) -> TestFunction:
    """Parse {"center": [cx, cy], "radius": r or [rx, ry], "amplitude": a}."""
    try:
        center = (float(literal["center"][0]), float(literal["center"][1]))
        radius = literal["radius"]
        if isinstance(radius, (int, float)):
            radius = (float(radius), float(radius))
        else:
            radius = (float(radius[0]), float(radius[1]))
        return TestFunction(center, radius, float(literal.get("amplitude", 1.0)))
    except (KeyError, TypeError, IndexError, ValueError) as e:
        raise DomainError(f"Malformed test function literal {literal!r}: {e}") from e
