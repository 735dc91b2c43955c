"""
Second-chaos functionals of a sampled field.

phi_E(C) = (1 / (8 pi sqrt(2E))) sum_k int_0^{L_k} B(g_k(t)) <grad B(g_k(t)), n_k> dt

over oriented polygonal chains, and the domain form of the second-chaos
projection of nodal length over rectangles,

L_E[2](D) = (pi sqrt(2E) / 8) [ -2 int_D B^2 + int_D |grad~ B|^2 ].

For clockwise rectangle boundaries the two agree realization by realization.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError, ResourceLimitError
from .field import PlaneWaveField, default_n_waves, derivative_scale, sample_field
from .geometry import PolygonalChain, RectDomain
from .nodal import log_normalization
from .quadrature import composite_nodes, panel_count


logger = logging.getLogger(__name__)

NODES_PER_PANEL = 12
MIN_SEGMENT_NODES = 20
MAX_NODES_PER_SIDE = 40000
CANONICAL_ENERGY = 1.0 / (4.0 * math.pi ** 2)


@dataclass(frozen=True)
class ChaosSample:
    """Raw second-chaos value, its normalized counterpart and the quadrature used."""
    raw: float
    normalized: float
    factor: float
    descriptor: str
    nodes: int


def boundary_factor(energy: float) -> float:
    """Multiplier 4 pi E^(1/4) for phi_E."""
    return 4.0 * math.pi * energy ** 0.25


def _half_wavelength(energy: float) -> float:
    return 0.5 / math.sqrt(energy)


def segment_rule(length: float, energy: float, refine: int = 1):
    """Composite Gauss-Legendre rule on [0, length] with at least max(20, 10 sqrt(E) L) nodes."""
    panels = panel_count(length, _half_wavelength(energy))
    needed = max(MIN_SEGMENT_NODES, int(math.ceil(10.0 * math.sqrt(energy) * length)))
    panels = max(panels, int(math.ceil(needed / NODES_PER_PANEL)))
    return composite_nodes(0.0, length, panels * refine, NODES_PER_PANEL)


def phi_boundary(field: PlaneWaveField, chain: PolygonalChain, refine: int = 1) -> ChaosSample:
    """
    Boundary line integral phi_E(C) of a realization over a chain.

    Args:
        field: Realization
        chain: Oriented polygonal chain
        refine: Panel multiplier for convergence checks

    Returns:
        ChaosSample with normalized = 4 pi E^(1/4) * raw
    """
    energy = field.energy
    total = 0.0
    nodes = 0
    for seg in chain:
        t, w = segment_rule(seg.length, energy, refine)
        pts = seg.point(t)
        val, gx, gy = field.value_and_gradient(pts[:, 0], pts[:, 1])
        n = seg.normal
        total += float(w @ (val * (gx * n[0] + gy * n[1])))
        nodes += t.size
    raw = total / (8.0 * math.pi * math.sqrt(2.0 * energy))
    factor = boundary_factor(energy)
    return ChaosSample(raw=raw, normalized=factor * raw, factor=factor,
                       descriptor=f"chain[{len(chain)} segments, length {chain.length:.6g}]", nodes=nodes)


def chaos2_domain(field: PlaneWaveField, domain: RectDomain, normalized: bool = True,
                  refine: int = 1) -> ChaosSample:
    """
    Domain form of the second-chaos nodal length over a rectangle.

    Args:
        field: Realization
        domain: Rectangle D
        normalized: Apply the sqrt(512 pi / log E) factor (requires E > e)
        refine: Panel multiplier for convergence checks

    Returns:
        ChaosSample with raw = L_E[2](D)

    Raises:
        NormalizationError: If normalized and E <= e
        ResourceLimitError: If the tensor rule is too large
    """
    energy = field.energy
    factor = log_normalization(energy) if normalized else 1.0
    descriptor = f"rect[{domain.x0:.6g},{domain.x1:.6g}]x[{domain.y0:.6g},{domain.y1:.6g}]"
    if domain.is_degenerate:
        return ChaosSample(raw=0.0, normalized=0.0, factor=factor, descriptor=descriptor, nodes=0)

    half = _half_wavelength(energy)
    nx = panel_count(domain.width, half) * refine
    ny = panel_count(domain.height, half) * refine
    if max(nx, ny) * NODES_PER_PANEL > MAX_NODES_PER_SIDE:
        raise ResourceLimitError(f"Domain quadrature needs {max(nx, ny) * NODES_PER_PANEL} nodes per side")
    xs, wx = composite_nodes(domain.x0, domain.x1, nx, NODES_PER_PANEL)
    ys, wy = composite_nodes(domain.y0, domain.y1, ny, NODES_PER_PANEL)
    val, gx, gy = field.grid_values(xs, ys, with_gradient=True)
    scale2 = derivative_scale(energy) ** 2
    integrand = -2.0 * val * val + (gx * gx + gy * gy) / scale2
    bracket = float(wx @ integrand @ wy)
    raw = math.pi * math.sqrt(2.0 * energy) / 8.0 * bracket
    return ChaosSample(raw=raw, normalized=factor * raw, factor=factor,
                       descriptor=descriptor, nodes=xs.size * ys.size)


def phi_tilde(field: PlaneWaveField, chain: PolygonalChain) -> float:
    """Normalized boundary functional 4 pi E^(1/4) phi_E(C)."""
    return phi_boundary(field, chain).normalized


def rescaled_n_waves(radius: float) -> int:
    """Plane-wave count for the canonical field on a domain dilated by R."""
    return default_n_waves((radius / (2.0 * math.pi)) ** 2)


def rescaled_chaos2(domain: RectDomain, radius: float, seed: int, replication: int,
                    n_waves: Optional[int] = None) -> float:
    """
    R^{-1} times the second-chaos nodal length of the canonical field on R * D.

    The canonical field has E = 1 / (4 pi^2); with R = 2 pi sqrt(E) the result
    has the law of phi_E(boundary of D).

    Raises:
        ResourceLimitError: If R * D needs too many quadrature nodes
    """
    if not radius > 0:
        raise ConfigurationError(f"Dilation must be positive, got {radius}")
    m = rescaled_n_waves(radius) if n_waves is None else n_waves
    field = sample_field(CANONICAL_ENERGY, m, seed, replication)
    sample = chaos2_domain(field, domain.scaled(radius), normalized=False)
    logger.debug("Rescaled chaos value at R=%.3g rep=%d: %.6g", radius, replication, sample.raw)
    return sample.raw / radius
