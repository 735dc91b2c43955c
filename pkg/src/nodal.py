"""
Nodal sets of sampled fields and the nodal-length partition function.

Zero lines are extracted cell by cell (marching squares) from grid samples,
with crossing points placed by linear interpolation and saddle cells resolved
by evaluating the field at the cell center.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .bumps import TestFunction, bump_integral
from .errors import DomainError, NormalizationError, ResourceLimitError
from .field import ScalarField
from .geometry import Point, RectDomain, snap_to_partition


logger = logging.getLogger(__name__)

DEFAULT_PPW = 10
MAX_CELLS = 10 ** 9
MEAN_LENGTH_DENSITY = math.pi / math.sqrt(2.0)

# edge order inside a cell: bottom, right, top, left
_BOTTOM, _RIGHT, _TOP, _LEFT = 0, 1, 2, 3


def log_normalization(energy: float) -> float:
    """
    Factor sqrt(512*pi / log E) turning nodal lengths into unit-scale fluctuations.

    Raises:
        NormalizationError: If E <= e
    """
    if not energy > math.e:
        raise NormalizationError(f"log E normalization needs E > e, got E = {energy}")
    return math.sqrt(512.0 * math.pi / math.log(energy))


def expected_length(energy: float, area: float) -> float:
    """Mean nodal length area * (pi / sqrt 2) * sqrt(E)."""
    return area * MEAN_LENGTH_DENSITY * math.sqrt(energy)


def default_K(energy: float) -> int:
    """Dyadic level max(3, floor((log E)^(1/10)) + 2); a configurable choice."""
    return max(3, int(math.floor(math.log(energy) ** 0.1)) + 2)


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid: nx by ny cells over a rectangle."""
    rect: RectDomain
    nx: int
    ny: int

    @property
    def hx(self) -> float:
        return self.rect.width / self.nx

    @property
    def hy(self) -> float:
        return self.rect.height / self.ny

    def xs(self) -> np.ndarray:
        out = self.rect.x0 + self.hx * np.arange(self.nx + 1)
        out[-1] = self.rect.x1
        return out

    def ys(self) -> np.ndarray:
        out = self.rect.y0 + self.hy * np.arange(self.ny + 1)
        out[-1] = self.rect.y1
        return out


def cells_for(length: float, spacing: float) -> int:
    return max(1, int(math.ceil(length / spacing - 1e-9)))


def make_grid(energy: float, rect: RectDomain, points_per_wavelength: int = DEFAULT_PPW,
              cells_per_side: Optional[Union[int, Tuple[int, int]]] = None) -> GridSpec:
    """
    Grid with spacing at most 1 / (ppw * sqrt(E)), or an explicit cell count.

    Raises:
        DomainError: If points_per_wavelength < 4 or the rectangle is degenerate
        ResourceLimitError: If the grid exceeds 10^9 cells
    """
    if rect.is_degenerate:
        raise DomainError("Cannot grid a degenerate rectangle")
    if cells_per_side is None:
        if points_per_wavelength < 4:
            raise DomainError(f"points_per_wavelength must be >= 4, got {points_per_wavelength}")
        h = 1.0 / (points_per_wavelength * math.sqrt(energy))
        nx, ny = cells_for(rect.width, h), cells_for(rect.height, h)
    elif isinstance(cells_per_side, int):
        nx = ny = cells_per_side
    else:
        nx, ny = cells_per_side
    if nx * ny > MAX_CELLS:
        raise ResourceLimitError(f"Grid of {nx} x {ny} cells exceeds the {MAX_CELLS} cell limit")
    return GridSpec(rect, int(nx), int(ny))


@dataclass(frozen=True, eq=False)
class NodalSet:
    """
    Nodal polyline segments, one or two per crossed cell, sorted by cell id.

    segments[:, :] holds x0, y0, x1, y1; cells holds (cell_i, cell_j).
    """
    grid: GridSpec
    cells: np.ndarray
    segments: np.ndarray
    lengths: np.ndarray

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.segments[:, :2] + self.segments[:, 2:])

    def __len__(self) -> int:
        return int(self.lengths.size)


def _crossing(v0: np.ndarray, v1: np.ndarray) -> np.ndarray:
    denom = v0 - v1
    return np.clip(v0 / np.where(denom == 0, 1.0, denom), 0.0, 1.0)


def extract_nodal(field: ScalarField, rect: RectDomain, points_per_wavelength: int = DEFAULT_PPW,
                  cells_per_side: Optional[Union[int, Tuple[int, int]]] = None) -> NodalSet:
    """
    Extract the zero set of a field inside a rectangle.

    Args:
        field: Field to sample
        rect: Bounding rectangle
        points_per_wavelength: Grid density relative to 1 / sqrt(E)
        cells_per_side: Explicit cell count overriding the density rule

    Returns:
        NodalSet with segments ordered by cell id

    Raises:
        ResourceLimitError: If the grid exceeds 10^9 cells
    """
    grid = make_grid(field.energy, rect, points_per_wavelength, cells_per_side)
    xs, ys = grid.xs(), grid.ys()
    (values,) = field.grid_values(xs, ys)
    positive = values > 0

    code = (positive[:-1, :-1].astype(np.uint8) + 2 * positive[1:, :-1]
            + 4 * positive[1:, 1:] + 8 * positive[:-1, 1:])
    ci, cj = np.nonzero((code != 0) & (code != 15))
    if ci.size == 0:
        return NodalSet(grid, np.zeros((0, 2), dtype=int), np.zeros((0, 4)), np.zeros(0))

    v00 = values[ci, cj]
    v10 = values[ci + 1, cj]
    v11 = values[ci + 1, cj + 1]
    v01 = values[ci, cj + 1]
    x0, x1 = xs[ci], xs[ci + 1]
    y0, y1 = ys[cj], ys[cj + 1]

    points = np.empty((ci.size, 4, 2))
    t = _crossing(v00, v10)
    points[:, _BOTTOM] = np.stack([x0 + t * (x1 - x0), y0], axis=1)
    t = _crossing(v10, v11)
    points[:, _RIGHT] = np.stack([x1, y0 + t * (y1 - y0)], axis=1)
    t = _crossing(v01, v11)
    points[:, _TOP] = np.stack([x0 + t * (x1 - x0), y1], axis=1)
    t = _crossing(v00, v01)
    points[:, _LEFT] = np.stack([x0, y0 + t * (y1 - y0)], axis=1)

    p00, p10, p11, p01 = v00 > 0, v10 > 0, v11 > 0, v01 > 0
    crosses = np.stack([p00 != p10, p10 != p11, p01 != p11, p00 != p01], axis=1)
    cell_code = code[ci, cj]
    saddle = (cell_code == 5) | (cell_code == 10)
    rows = np.arange(ci.size)

    plain = ~saddle
    first = np.argmax(crosses, axis=1)
    second = 3 - np.argmax(crosses[:, ::-1], axis=1)
    starts = [points[rows[plain], first[plain]]]
    ends = [points[rows[plain], second[plain]]]
    owners = [rows[plain]]

    if saddle.any():
        sr = rows[saddle]
        center = field.values(0.5 * (x0[sr] + x1[sr]), 0.5 * (y0[sr] + y1[sr])) > 0
        joined = center == p00[sr]
        # joined: cut off corners v10 and v01; otherwise cut off v00 and v11
        b1 = np.where(joined, _RIGHT, _LEFT)
        a2 = np.where(joined, _LEFT, _RIGHT)
        starts += [points[sr, _BOTTOM], points[sr, a2]]
        ends += [points[sr, b1], points[sr, _TOP]]
        owners += [sr, sr]

    start = np.concatenate(starts)
    end = np.concatenate(ends)
    owner = np.concatenate(owners)
    order = np.argsort(owner, kind="stable")
    start, end, owner = start[order], end[order], owner[order]

    segments = np.hstack([start, end])
    lengths = np.hypot(end[:, 0] - start[:, 0], end[:, 1] - start[:, 1])
    cells = np.stack([ci[owner], cj[owner]], axis=1)
    logger.debug("Extracted %d nodal segments on a %d x %d grid", lengths.size, grid.nx, grid.ny)
    return NodalSet(grid, cells, segments, lengths)


def clip_lengths(segments: np.ndarray, rect: RectDomain) -> np.ndarray:
    """Lengths of segments clipped to a rectangle (Liang-Barsky)."""
    x0, y0 = segments[:, 0], segments[:, 1]
    dx, dy = segments[:, 2] - x0, segments[:, 3] - y0
    t0 = np.zeros(x0.size)
    t1 = np.ones(x0.size)
    keep = np.ones(x0.size, dtype=bool)
    for p, q in ((-dx, x0 - rect.x0), (dx, rect.x1 - x0), (-dy, y0 - rect.y0), (dy, rect.y1 - y0)):
        flat = p == 0
        keep &= ~(flat & (q < 0))
        ratio = q / np.where(flat, 1.0, p)
        t0 = np.where(~flat & (p < 0), np.maximum(t0, ratio), t0)
        t1 = np.where(~flat & (p > 0), np.minimum(t1, ratio), t1)
    span = np.where(keep & (t1 > t0), t1 - t0, 0.0)
    return span * np.hypot(dx, dy)


def nodal_length(ns: NodalSet, rect: RectDomain) -> float:
    """
    Nodal length inside a sub-rectangle, with exact clipping.

    Raises:
        DomainError: If rect is not inside the sampled rectangle
    """
    if not ns.grid.rect.contains(rect):
        raise DomainError(f"Rectangle {rect} lies outside the sampled region {ns.grid.rect}")
    if rect.is_degenerate or len(ns) == 0:
        return 0.0
    if rect == ns.grid.rect:
        return ns.total_length
    return float(clip_lengths(ns.segments, rect).sum())


@dataclass(frozen=True, eq=False)
class CumulativeLengthGrid:
    """
    Nodal length of D_p for every dyadic point p of level K.

    values[i1, i2] is the raw length of [0, i1/2^K] x [0, i2/2^K].
    """
    K: int
    values: np.ndarray
    energy: float
    factor: float
    cells_per_side: int

    @property
    def size(self) -> int:
        return 2 ** self.K

    @property
    def mean_density(self) -> float:
        return MEAN_LENGTH_DENSITY * math.sqrt(self.energy)

    @property
    def normalized(self) -> np.ndarray:
        """X_E at the dyadic points."""
        p = np.arange(self.size + 1) / self.size
        return self.factor * (self.values - self.mean_density * np.outer(p, p))

    def normalization_record(self) -> Dict[str, float]:
        return {"mean_density": self.mean_density, "factor": self.factor, "K": self.K}


def partition_function(field: ScalarField, K: int, ppw: int = DEFAULT_PPW) -> CumulativeLengthGrid:
    """
    Cumulative nodal length on the dyadic grid of level K over the unit square.

    The sampling grid is refined to a multiple of 2^K cells per side so that
    every marching-squares cell sits inside exactly one dyadic cell; dyadic
    increments are then prefix-summed.

    Raises:
        DomainError: If K < 1
        NormalizationError: If E <= e
    """
    if K < 1:
        raise DomainError(f"K must be at least 1, got {K}")
    factor = log_normalization(field.energy)
    top = 2 ** K
    if ppw < 4:
        raise DomainError(f"points_per_wavelength must be >= 4, got {ppw}")
    n = cells_for(1.0, 1.0 / (ppw * math.sqrt(field.energy)))
    n = int(math.ceil(n / top)) * top
    ns = extract_nodal(field, RectDomain.unit(), cells_per_side=n)

    block = n // top
    dyadic = (ns.cells[:, 0] // block) * top + ns.cells[:, 1] // block
    increments = np.bincount(dyadic, weights=ns.lengths, minlength=top * top).reshape(top, top)
    values = np.zeros((top + 1, top + 1))
    values[1:, 1:] = increments.cumsum(axis=0).cumsum(axis=1)
    return CumulativeLengthGrid(K=K, values=values, energy=field.energy, factor=factor, cells_per_side=n)


def discretize(grid: CumulativeLengthGrid, t: Point) -> float:
    """X_E^K(t): the normalized value at the dyadic point snapped from t."""
    idx = snap_to_partition(t, grid.K)
    return float(grid.normalized[idx.i1, idx.i2])


def boundary_sup(grid: CumulativeLengthGrid) -> float:
    """Maximum of |X_E^K| over dyadic points on the boundary of the unit square."""
    x = np.abs(grid.normalized)
    return float(max(x[0, :].max(), x[-1, :].max(), x[:, 0].max(), x[:, -1].max()))


def grid_sup(field: ScalarField, rect: RectDomain, ppw: int = DEFAULT_PPW) -> float:
    """
    sup of |B| over a rectangle: grid maximum on the nodal grid, refined once
    on a half-spacing lattice around the argmax node.
    """
    grid = make_grid(field.energy, rect, ppw)
    xs, ys = grid.xs(), grid.ys()
    (values,) = field.grid_values(xs, ys)
    values = np.abs(values)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    fine_x = np.clip(xs[i] + 0.5 * grid.hx * np.arange(-2, 3), rect.x0, rect.x1)
    fine_y = np.clip(ys[j] + 0.5 * grid.hy * np.arange(-2, 3), rect.y0, rect.y1)
    (refined,) = field.grid_values(fine_x, fine_y)
    return float(max(values[i, j], np.abs(refined).max()))


def pair_with_test_function(ns: NodalSet, phi: TestFunction, energy: float) -> float:
    """
    Normalized pairing of the nodal length measure with a test function.

    Raises:
        DomainError: If phi is not supported inside (0,1)^2
    """
    phi.require_inside_unit_square()
    if not ns.grid.rect.contains(phi.support):
        raise DomainError("Test function support is outside the sampled region")
    mid = ns.midpoints
    raw = float(phi(mid[:, 0], mid[:, 1]) @ ns.lengths) if len(ns) else 0.0
    return log_normalization(energy) * (raw - MEAN_LENGTH_DENSITY * math.sqrt(energy) * bump_integral(phi))


def nodal_set_rows(ns: NodalSet) -> List[Dict[str, float]]:
    """Rows for the cell_i,cell_j,x0,y0,x1,y1,len export."""
    return [
        {"cell_i": int(c[0]), "cell_j": int(c[1]), "x0": s[0], "y0": s[1], "x1": s[2], "y1": s[3], "len": l}
        for c, s, l in zip(ns.cells, ns.segments.tolist(), ns.lengths.tolist())
    ]


def grid_rows(grid: CumulativeLengthGrid) -> List[Dict[str, float]]:
    """Rows for the i1,i2,raw,normalized export."""
    norm = grid.normalized
    return [
        {"i1": i1, "i2": i2, "raw": float(grid.values[i1, i2]), "normalized": float(norm[i1, i2])}
        for i1 in range(grid.size + 1) for i2 in range(grid.size + 1)
    ]
