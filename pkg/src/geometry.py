"""
Oriented segments, polygonal chains and dyadic partitions.

A segment p + t(cos theta, sin theta), 0 <= t <= L, carries the normal
(-sin theta, cos theta). Rectangle boundaries are emitted clockwise, which
makes every normal point outward.
"""

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, GeometryError


logger = logging.getLogger(__name__)

Point = Tuple[float, float]

COLLINEAR_TOL = 1e-9
JOINT_TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OrientedSegment:
    """Directed segment with origin, angle in [0, 2*pi) and positive length."""
    origin: Point
    theta: float
    length: float

    def __post_init__(self):
        x, y = float(self.origin[0]), float(self.origin[1])
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(self.theta)):
            raise GeometryError("Segment data must be finite")
        if not self.length > 0 or not math.isfinite(self.length):
            raise GeometryError(f"Segment length must be positive, got {self.length}")
        object.__setattr__(self, "origin", (x, y))
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "length", float(self.length))

    @classmethod
    def between(cls, start: Point, end: Point) -> "OrientedSegment":
        """Segment from start to end."""
        dx, dy = end[0] - start[0], end[1] - start[1]
        return cls(origin=start, theta=math.atan2(dy, dx), length=math.hypot(dx, dy))

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def normal(self) -> np.ndarray:
        return np.array([-math.sin(self.theta), math.cos(self.theta)])

    @property
    def end(self) -> Point:
        return (self.origin[0] + self.length * math.cos(self.theta),
                self.origin[1] + self.length * math.sin(self.theta))

    def point(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """Points at arc-length parameter t (scalar or array), shape (..., 2)."""
        t = np.asarray(t, dtype=float)
        return np.stack([self.origin[0] + t * math.cos(self.theta),
                         self.origin[1] + t * math.sin(self.theta)], axis=-1)

    def reversed(self) -> "OrientedSegment":
        return OrientedSegment(origin=self.end, theta=self.theta + math.pi, length=self.length)

    def split(self, fraction: float) -> Tuple["OrientedSegment", "OrientedSegment"]:
        """Split at a fraction of the length in (0, 1)."""
        if not 0.0 < fraction < 1.0:
            raise GeometryError(f"Split fraction must lie in (0, 1), got {fraction}")
        cut = fraction * self.length
        mid = tuple(self.point(cut))
        return (OrientedSegment(self.origin, self.theta, cut),
                OrientedSegment(mid, self.theta, self.length - cut))

    def translated(self, dx: float, dy: float) -> "OrientedSegment":
        return OrientedSegment((self.origin[0] + dx, self.origin[1] + dy), self.theta, self.length)

    def rotated(self, angle: float, center: Point = (0.0, 0.0)) -> "OrientedSegment":
        c, s = math.cos(angle), math.sin(angle)
        x, y = self.origin[0] - center[0], self.origin[1] - center[1]
        origin = (center[0] + c * x - s * y, center[1] + s * x + c * y)
        return OrientedSegment(origin, self.theta + angle, self.length)


def _angle_gap_mod_pi(a: float, b: float) -> float:
    gap = (a - b) % math.pi
    return min(gap, math.pi - gap)


def _line_distance(seg: OrientedSegment, p: Point) -> float:
    d = seg.direction
    return abs((p[0] - seg.origin[0]) * d[1] - (p[1] - seg.origin[1]) * d[0])


def are_collinear(s: OrientedSegment, t: OrientedSegment, tol: float = COLLINEAR_TOL) -> bool:
    """Both endpoints of t lie on the line of s and the angles agree modulo pi."""
    if _angle_gap_mod_pi(s.theta, t.theta) > tol:
        return False
    return _line_distance(s, t.origin) <= tol and _line_distance(s, t.end) <= tol


def segment_signed_overlap(s: OrientedSegment, t: OrientedSegment) -> float:
    """
    Signed length of the intersection of two segments.

    Nonzero only for collinear segments with overlapping support; positive when
    the orientations agree and negative when they are opposite.
    """
    if not are_collinear(s, t):
        return 0.0
    d = s.direction
    a = (t.origin[0] - s.origin[0]) * d[0] + (t.origin[1] - s.origin[1]) * d[1]
    b = (t.end[0] - s.origin[0]) * d[0] + (t.end[1] - s.origin[1]) * d[1]
    lo = max(0.0, min(a, b))
    hi = min(s.length, max(a, b))
    if hi <= lo:
        return 0.0
    sign = 1.0 if float(np.dot(s.normal, t.normal)) > 0 else -1.0
    return sign * (hi - lo)


def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def segments_touch(s: OrientedSegment, t: OrientedSegment, eps: float = 1e-12) -> bool:
    """True if the closed segments share at least one point."""
    p1, p2 = s.origin, s.end
    q1, q2 = t.origin, t.end
    r = (p2[0] - p1[0], p2[1] - p1[1])
    u = (q2[0] - q1[0], q2[1] - q1[1])
    qp = (q1[0] - p1[0], q1[1] - p1[1])
    denom = _cross(r[0], r[1], u[0], u[1])
    if abs(denom) < eps:
        if are_collinear(s, t):
            d = s.direction
            a = qp[0] * d[0] + qp[1] * d[1]
            b = (q2[0] - p1[0]) * d[0] + (q2[1] - p1[1]) * d[1]
            return max(0.0, min(a, b)) <= min(s.length, max(a, b)) + eps
        return False
    lam = _cross(qp[0], qp[1], u[0], u[1]) / denom
    mu = _cross(qp[0], qp[1], r[0], r[1]) / denom
    return -eps <= lam <= 1 + eps and -eps <= mu <= 1 + eps


@dataclass(frozen=True)
class PolygonalChain:
    """Ordered, chained oriented segments; closed chains return to their start."""
    segments: Tuple[OrientedSegment, ...]
    closed: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise GeometryError("A chain needs at least one segment")
        object.__setattr__(self, "segments", segs)
        for k in range(len(segs) - 1):
            if not _points_close(segs[k].end, segs[k + 1].origin):
                raise GeometryError(f"Segment {k} does not end where segment {k + 1} starts")
        if self.closed and not _points_close(segs[-1].end, segs[0].origin):
            raise GeometryError("Closed chain does not return to its first origin")

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def reversed(self) -> "PolygonalChain":
        return PolygonalChain(tuple(s.reversed() for s in reversed(self.segments)), self.closed)

    def translated(self, dx: float, dy: float) -> "PolygonalChain":
        return PolygonalChain(tuple(s.translated(dx, dy) for s in self.segments), self.closed)

    def rotated(self, angle: float, center: Point = (0.0, 0.0)) -> "PolygonalChain":
        return PolygonalChain(tuple(s.rotated(angle, center) for s in self.segments), self.closed)

    def split_segment(self, index: int, fraction: float) -> "PolygonalChain":
        """Replace one segment by its two halves at the given fraction."""
        head, tail = self.segments[index].split(fraction)
        segs = self.segments[:index] + (head, tail) + self.segments[index + 1:]
        return PolygonalChain(segs, self.closed)

    def is_simple(self) -> bool:
        """Pairwise scan: only consecutive segments may meet, and only at their joint."""
        segs = self.segments
        n = len(segs)
        for i in range(n):
            for j in range(i + 1, n):
                adjacent = j == i + 1 or (self.closed and i == 0 and j == n - 1 and n > 2)
                if adjacent:
                    if are_collinear(segs[i], segs[j]) and abs(segment_signed_overlap(segs[i], segs[j])) > JOINT_TOL:
                        return False
                elif segments_touch(segs[i], segs[j]):
                    return False
        return True


def _points_close(p: Point, q: Point) -> bool:
    scale = max(1.0, abs(p[0]), abs(p[1]))
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= JOINT_TOL * scale


def make_chain(segments: Iterable[OrientedSegment], closed: bool = False) -> PolygonalChain:
    """Build a chain and warn (without failing) if it is not simple."""
    chain = PolygonalChain(tuple(segments), closed)
    if not chain.is_simple():
        logger.warning("Chain with %d segments is not simple; formulas remain evaluable", len(chain))
    return chain


def polyline_chain(points: Sequence[Point], closed: bool = False) -> PolygonalChain:
    """Chain through consecutive vertices (closing back to the first if closed)."""
    pts = list(points)
    if closed:
        pts = pts + [pts[0]]
    return make_chain([OrientedSegment.between(a, b) for a, b in zip(pts[:-1], pts[1:])], closed)


def signed_length(a: PolygonalChain, c: PolygonalChain) -> float:
    """Double sum of signed segment overlaps; symmetric, and lambda(C, C) = length(C)."""
    return float(sum(segment_signed_overlap(t, s) for t in a for s in c))


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle [x0, x1] x [y0, y1]; zero width or height is degenerate."""
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 >= self.x0 and self.y1 >= self.y0):
            raise GeometryError(f"Invalid rectangle [{self.x0},{self.x1}]x[{self.y0},{self.y1}]")

    @classmethod
    def anchored(cls, t1: float, t2: float) -> "RectDomain":
        """D_t = [0, t1] x [0, t2] with t in the unit square."""
        if not (0.0 <= t1 <= 1.0 and 0.0 <= t2 <= 1.0):
            raise DomainError(f"t = ({t1}, {t2}) is outside [0,1]^2")
        return cls(0.0, float(t1), 0.0, float(t2))

    @classmethod
    def unit(cls) -> "RectDomain":
        return cls(0.0, 1.0, 0.0, 1.0)

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    @property
    def is_degenerate(self) -> bool:
        return self.width == 0.0 or self.height == 0.0

    def contains(self, other: "RectDomain", tol: float = 1e-12) -> bool:
        return (other.x0 >= self.x0 - tol and other.x1 <= self.x1 + tol
                and other.y0 >= self.y0 - tol and other.y1 <= self.y1 + tol)

    def intersection(self, other: "RectDomain") -> Optional["RectDomain"]:
        x0, x1 = max(self.x0, other.x0), min(self.x1, other.x1)
        y0, y1 = max(self.y0, other.y0), min(self.y1, other.y1)
        if x1 < x0 or y1 < y0:
            return None
        return RectDomain(x0, x1, y0, y1)

    def scaled(self, factor: float) -> "RectDomain":
        return RectDomain(factor * self.x0, factor * self.x1, factor * self.y0, factor * self.y1)


def rect_overlap_area(d1: RectDomain, d2: RectDomain) -> float:
    inter = d1.intersection(d2)
    return 0.0 if inter is None else inter.area


def rect_boundary_chain(domain: RectDomain) -> PolygonalChain:
    """
    Clockwise closed boundary chain of a rectangle.

    Starts at the lower-left corner and runs up, right, down, left, so every
    normal points outward.

    Raises:
        GeometryError: For a degenerate rectangle
    """
    if domain.is_degenerate:
        raise GeometryError("Degenerate rectangle has no boundary chain")
    w, h = domain.width, domain.height
    x0, x1, y0, y1 = domain.x0, domain.x1, domain.y0, domain.y1
    segs = (
        OrientedSegment((x0, y0), math.pi / 2, h),
        OrientedSegment((x0, y1), 0.0, w),
        OrientedSegment((x1, y1), 3 * math.pi / 2, h),
        OrientedSegment((x1, y0), math.pi, w),
    )
    return PolygonalChain(segs, closed=True)


@dataclass(frozen=True)
class PartitionIndex:
    """Index of a dyadic partition point p_i(K) = (i1, i2) / 2^K."""
    K: int
    i1: int
    i2: int

    def __post_init__(self):
        top = 2 ** self.K
        if self.K < 1 or not (0 <= self.i1 <= top and 0 <= self.i2 <= top):
            raise DomainError(f"Invalid partition index ({self.i1}, {self.i2}) at K={self.K}")

    @property
    def point(self) -> Point:
        top = float(2 ** self.K)
        return (self.i1 / top, self.i2 / top)


def snap_to_partition(t: Point, K: int) -> PartitionIndex:
    """
    Closest dyadic partition point to the lower left of t.

    A coordinate equal to 1 maps to index 2^K.

    Raises:
        DomainError: If t is outside [0,1]^2 or K < 1
    """
    if K < 1:
        raise DomainError(f"K must be at least 1, got {K}")
    t1, t2 = float(t[0]), float(t[1])
    if not (0.0 <= t1 <= 1.0 and 0.0 <= t2 <= 1.0):
        raise DomainError(f"t = ({t1}, {t2}) is outside [0,1]^2")
    top = 2 ** K
    # scaling by a power of two is exact, so floor is exact
    return PartitionIndex(K, min(top, int(math.floor(t1 * top))), min(top, int(math.floor(t2 * top))))


def discretized_signed_length(a: PolygonalChain, c: PolygonalChain, step: float = 1e-4) -> float:
    """
    Brute-force signed length: sample A at spacing step and count collinear
    coincidences with C, weighted by the sign of the normal agreement.
    """
    total = 0.0
    for t in a:
        n = max(1, int(math.ceil(t.length / step)))
        h = t.length / n
        pts = t.point((np.arange(n) + 0.5) * h)
        for s in c:
            if _angle_gap_mod_pi(s.theta, t.theta) > COLLINEAR_TOL:
                continue
            d = s.direction
            rel = pts - np.array(s.origin)
            along = rel @ d
            off = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0])
            hits = (off <= COLLINEAR_TOL) & (along >= 0.0) & (along <= s.length)
            if hits.any():
                sign = 1.0 if float(np.dot(s.normal, t.normal)) > 0 else -1.0
                total += sign * h * int(hits.sum())
    return total


def _segment_from_literal(item: Dict[str, Any]) -> OrientedSegment:
    try:
        p = item["p"]
        return OrientedSegment((float(p[0]), float(p[1])), float(item["theta"]), float(item["len"]))
    except (KeyError, TypeError, IndexError, ValueError) as e:
        raise GeometryError(f"Malformed segment literal {item!r}: {e}") from e


def parse_chain(literal: Union[str, Dict[str, Any], List[Any]]) -> PolygonalChain:
    """
    Parse a chain literal.

    Accepted forms:
        {"segments": [{"p": [x, y], "theta": r, "len": L}, ...], "closed": bool}
        [{"p": ..., "theta": ..., "len": ...}, ...]   (open chain)
        {"rect": [t1, t2]}                            (clockwise boundary of D_t)

    Raises:
        GeometryError: For malformed literals or broken chaining
    """
    if isinstance(literal, str):
        try:
            literal = json.loads(literal)
        except json.JSONDecodeError as e:
            raise GeometryError(f"Chain literal is not valid JSON: {e}") from e
    if isinstance(literal, list):
        return make_chain([_segment_from_literal(item) for item in literal], closed=False)
    if not isinstance(literal, dict):
        raise GeometryError(f"Unsupported chain literal {literal!r}")
    if "rect" in literal:
        spec = literal["rect"]
        if not isinstance(spec, (list, tuple)) or len(spec) != 2:
            raise GeometryError("Rectangle sugar expects {\"rect\": [t1, t2]}")
        return rect_boundary_chain(RectDomain.anchored(float(spec[0]), float(spec[1])))
    if "segments" not in literal:
        raise GeometryError("Chain literal needs a 'segments' or 'rect' key")
    segs = [_segment_from_literal(item) for item in literal["segments"]]
    return make_chain(segs, closed=bool(literal.get("closed", False)))


def chain_to_literal(chain: PolygonalChain) -> Dict[str, Any]:
    """Inverse of parse_chain for the segment form."""
    return {
        "segments": [{"p": [s.origin[0], s.origin[1]], "theta": s.theta, "len": s.length}
                     for s in chain],
        "closed": chain.closed,
    }
