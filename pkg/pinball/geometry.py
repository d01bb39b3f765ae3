"""
Polygon representation, boundary parametrization, ray casting and unfolding.

Sides are numbered 1..d; side i runs from vertex i to vertex i+1 (cyclic).
A boundary point is the pair (side, s) with s the arc length measured from
the side's start vertex. The angle of a direction leaving side i is taken
from the inward normal n_i, positive toward the side direction u_i, so the
velocity is cos(theta) n_i + sin(theta) u_i and specular reflection from
side i onto side j reads theta_out = beta[i, j] - theta_in.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import THETA_TOL, VERTEX_TOL
from .exceptions import (
    ClockwiseOrientationError,
    DegenerateSideError,
    GeometryError,
    GrazingRayError,
    IllegalItineraryError,
    NonSimplePolygonError,
    ParallelLinesError,
    PolygonFileError,
    VertexCrossingError,
    VertexStartError,
)

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi


def _cross(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True)
class BoundaryPoint:
    """Point on side `side` (1-based) at arc length `s` from its start vertex"""
    side: int
    s: float

    def is_interior(self, polygon: "Polygon") -> bool:
        return 0.0 < self.s < polygon.side_length(self.side)


class HitKind(Enum):
    """Where a ray lands on the boundary"""
    INTERIOR = "interior"
    VERTEX = "vertex"


@dataclass(frozen=True)
class RayHit:
    """First boundary point met by a ray"""
    target: BoundaryPoint
    segment_length: float
    classification: HitKind

    @property
    def is_vertex(self) -> bool:
        return self.classification is HitKind.VERTEX


@dataclass(frozen=True, eq=False)
class Polygon:
    """Simple counterclockwise polygon with its beta table.

    Use build_polygon() to construct a validated instance. Derived arrays are
    read-only; beta[i, j] is indexed from zero.
    """
    vertices: np.ndarray
    name: str = "polygon"
    directions: np.ndarray = field(init=False, repr=False)
    normals: np.ndarray = field(init=False, repr=False)
    side_lengths: np.ndarray = field(init=False, repr=False)
    beta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vertices = np.array(self.vertices, dtype=float)
        edges = np.roll(vertices, -1, axis=0) - vertices
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        directions = edges / lengths[:, None]
        normals = np.column_stack((-directions[:, 1], directions[:, 0]))

        # oriented angle from u_i to u_j, then beta = pi - angle in (-pi, pi]
        ux, uy = directions[:, 0], directions[:, 1]
        gamma = np.arctan2(np.outer(ux, uy) - np.outer(uy, ux), directions @ directions.T)
        beta = math.pi - gamma
        beta = np.where(beta > math.pi, beta - 2.0 * math.pi, beta)
        np.fill_diagonal(beta, 0.0)

        for name, value in (("vertices", vertices), ("directions", directions),
                            ("normals", normals), ("side_lengths", lengths), ("beta", beta)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def d(self) -> int:
        return len(self.vertices)

    @property
    def perimeter(self) -> float:
        return float(self.side_lengths.sum())

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @property
    def diameter(self) -> float:
        diff = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((diff ** 2).sum(axis=-1)).max())

    @property
    def vertex_slack(self) -> float:
        """Absolute distance under which a point counts as a corner"""
        return VERTEX_TOL * self.perimeter

    def _index(self, side: int) -> int:
        if not 1 <= side <= self.d:
            raise GeometryError(f"side {side} outside 1..{self.d}", context={"polygon": self.name})
        return side - 1

    def side_length(self, side: int) -> float:
        return float(self.side_lengths[self._index(side)])

    def beta_of(self, i: int, j: int) -> float:
        """beta_{i,j} for 1-based sides"""
        return float(self.beta[self._index(i), self._index(j)])

    def point(self, side: int, s: float) -> np.ndarray:
        k = self._index(side)
        return self.vertices[k] + s * self.directions[k]

    def direction(self, side: int, theta: float) -> np.ndarray:
        k = self._index(side)
        return math.cos(theta) * self.normals[k] + math.sin(theta) * self.directions[k]

    def angle_of(self, side: int, vector: np.ndarray) -> float:
        """Angle of `vector` measured from the inward normal of `side`"""
        k = self._index(side)
        return math.atan2(float(vector @ self.directions[k]), float(vector @ self.normals[k]))

    def xy(self, p: BoundaryPoint) -> np.ndarray:
        return self.point(p.side, p.s)


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_intersect(p1: np.ndarray, p2: np.ndarray, q1: np.ndarray, q2: np.ndarray,
                        eps: float) -> bool:
    d1 = _cross(p2 - p1, q1 - p1)
    d2 = _cross(p2 - p1, q2 - p1)
    d3 = _cross(q2 - q1, p1 - q1)
    d4 = _cross(q2 - q1, p2 - q1)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
            ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)):
        return True

    def on_segment(a: np.ndarray, b: np.ndarray, c: np.ndarray, dist: float) -> bool:
        return abs(dist) <= eps and min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps \
            and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps

    return (on_segment(p1, p2, q1, d1) or on_segment(p1, p2, q2, d2)
            or on_segment(q1, q2, p1, d3) or on_segment(q1, q2, p2, d4))


def build_polygon(vertices: Union[Sequence[Sequence[float]], np.ndarray],
                  name: str = "polygon") -> Polygon:
    """Validate a counterclockwise vertex list and build the Polygon"""
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise NonSimplePolygonError(f"expected an (n, 2) vertex array, got shape {pts.shape}")
    if len(pts) < 3:
        raise NonSimplePolygonError(f"a polygon needs at least 3 vertices, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise NonSimplePolygonError("vertex coordinates must be finite")

    d = len(pts)
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    scale = float(lengths.max())
    eps = 1e-12 * max(scale, 1.0)
    short = np.flatnonzero(lengths <= eps)
    if short.size:
        raise DegenerateSideError(f"side {int(short[0]) + 1} has zero length",
                                  context={"side": int(short[0]) + 1})

    for a in range(d):
        # consecutive sides folding back onto each other
        b = (a + 1) % d
        if abs(_cross(edges[a], edges[b])) <= eps * scale and float(edges[a] @ edges[b]) < 0:
            raise NonSimplePolygonError(f"sides {a + 1} and {b + 1} overlap")
        for c in range(a + 2, d):
            if a == 0 and c == d - 1:
                continue
            if _segments_intersect(pts[a], pts[(a + 1) % d], pts[c], pts[(c + 1) % d], eps):
                raise NonSimplePolygonError(f"sides {a + 1} and {c + 1} intersect",
                                            context={"sides": (a + 1, c + 1)})

    area = _signed_area(pts)
    if abs(area) <= eps * scale:
        raise NonSimplePolygonError("polygon has zero area")
    if area < 0:
        raise ClockwiseOrientationError("vertices must be listed counterclockwise",
                                        context={"signed_area": area})

    polygon = Polygon(pts, name=name)
    logger.debug("Built polygon %s with %d sides, perimeter %.6g", name, d, polygon.perimeter)
    return polygon


def load_polygon_file(path: str, name: Optional[str] = None) -> Polygon:
    """Read "x y" vertex lines ('#' starts a comment line)"""
    try:
        pts = np.loadtxt(path, comments="#", ndmin=2, dtype=float)
    except OSError as e:
        raise PolygonFileError(f"cannot read polygon file {path}: {e}", context={"path": path}) from e
    except ValueError as e:
        raise PolygonFileError(f"malformed polygon file {path}: {e}", context={"path": path}) from e
    if pts.shape[1] != 2:
        raise PolygonFileError(f"{path}: expected two fields per line, got {pts.shape[1]}",
                               context={"path": path})
    return build_polygon(pts, name=name or path)


def project(polygon: Polygon, i: int, j: int, s: float, theta: float) -> Tuple[float, float]:
    """Supporting-line projection from side i to side j.

    Follows the line through point(i, s) in direction(i, theta) to the
    supporting line of side j. Returns (s', t): the coordinate on side j's
    line and the signed distance travelled. Neither s nor s' has to lie on
    the actual sides.
    """
    theta_bar = polygon.beta_of(i, j) - theta
    if abs(theta_bar) >= HALF_PI - THETA_TOL:
        raise ParallelLinesError(
            f"projection from side {i} to side {j} undefined at theta={theta:.6g}",
            context={"from": i, "to": j, "theta": theta})
    x = polygon.point(i, s)
    d = polygon.direction(i, theta)
    k = j - 1
    w = polygon.vertices[k] - x
    denom = _cross(d, polygon.directions[k])
    t = _cross(w, polygon.directions[k]) / denom
    s_next = _cross(w, d) / denom
    return s_next, t


def oriented_length(polygon: Polygon, start: BoundaryPoint, theta: float,
                    to_side: Optional[int] = None) -> float:
    """Signed length of the leg from `start` to the supporting line of `to_side`.

    Without `to_side` the leg ends on the side the ray actually hits. Pass it
    for the extended maps, where either end may sit on a supporting line or
    the start may be a corner.
    """
    if to_side is None:
        to_side = cast_ray(polygon, start, theta).target.side
    return project(polygon, start.side, to_side, start.s, theta)[1]


def _first_crossing(vertices: np.ndarray, origin: np.ndarray, d: np.ndarray, t_min: float,
                    slack: float, exclude: int) -> Optional[Tuple[int, float, float]]:
    """Nearest side of `vertices` crossed by origin + t d with t > t_min"""
    edges = np.roll(vertices, -1, axis=0) - vertices
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    u = edges / lengths[:, None]
    w = vertices - origin
    denom = d[0] * u[:, 1] - d[1] * u[:, 0]
    valid = np.abs(denom) > 1e-15
    safe = np.where(valid, denom, 1.0)
    t = (w[:, 0] * u[:, 1] - w[:, 1] * u[:, 0]) / safe
    sp = (w[:, 0] * d[1] - w[:, 1] * d[0]) / safe
    mask = valid & (t > t_min) & (sp >= -slack) & (sp <= lengths + slack)
    if exclude >= 0:
        mask[exclude] = False
    candidates = np.flatnonzero(mask)
    if candidates.size == 0:
        return None
    k = int(candidates[np.argmin(t[candidates])])
    return k, float(t[k]), float(min(max(sp[k], 0.0), lengths[k]))


def cast_ray(polygon: Polygon, start: BoundaryPoint, theta: float,
             allow_corner: bool = False) -> RayHit:
    """First intersection of the ray leaving `start` at angle `theta` with the boundary.

    allow_corner permits starting exactly at a corner, which is how
    generalized diagonals are followed.
    """
    length = polygon.side_length(start.side)
    if allow_corner:
        if not 0.0 <= start.s <= length:
            raise VertexStartError(f"s={start.s} outside side {start.side}")
    elif not 0.0 < start.s < length:
        raise VertexStartError(f"ray starts at a corner of side {start.side} (s={start.s})",
                               context={"side": start.side, "s": start.s})
    if abs(theta) >= HALF_PI - THETA_TOL:
        raise GrazingRayError(f"grazing angle {theta:.12g}", context={"theta": theta})

    slack = polygon.vertex_slack
    found = _first_crossing(polygon.vertices, polygon.xy(start), polygon.direction(start.side, theta),
                            slack, slack, start.side - 1)
    if found is None:
        raise GeometryError("ray does not meet the boundary", context={"side": start.side,
                                                                       "s": start.s,
                                                                       "theta": theta})
    k, t, s_hit = found
    side_len = float(polygon.side_lengths[k])
    kind = HitKind.VERTEX if min(s_hit, side_len - s_hit) <= slack else HitKind.INTERIOR
    return RayHit(BoundaryPoint(k + 1, s_hit), t, kind)


def _reflection(a: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Homogeneous matrix of the reflection across the line through a along unit e"""
    linear = 2.0 * np.outer(e, e) - np.eye(2)
    out = np.eye(3)
    out[:2, :2] = linear
    out[:2, 2] = a - linear @ a
    return out


def _apply(matrix: np.ndarray, points: np.ndarray) -> np.ndarray:
    return points @ matrix[:2, :2].T + matrix[:2, 2]


@dataclass(frozen=True)
class Unfolding:
    """Straightened trajectory through a chain of reflected polygon copies.

    isometries[k] maps the polygon onto the copy in which the line crosses
    crossings[k], which is the image of side sides[k].
    """
    origin: np.ndarray
    direction: np.ndarray
    isometries: Tuple[np.ndarray, ...]
    crossings: Tuple[np.ndarray, ...]
    sides: Tuple[int, ...]

    def copies(self, polygon: Polygon) -> List[np.ndarray]:
        """Vertex arrays of the reflected copies, one per crossing"""
        return [_apply(m, polygon.vertices) for m in self.isometries]

    def fold(self, polygon: Polygon) -> List[BoundaryPoint]:
        """Map the crossings back to boundary points of the original polygon"""
        points = []
        for m, q, side in zip(self.isometries, self.crossings, self.sides):
            back = _apply(np.linalg.inv(m), q[None, :])[0]
            k = side - 1
            s = float((back - polygon.vertices[k]) @ polygon.directions[k])
            points.append(BoundaryPoint(side, s))
        return points


def unfold(polygon: Polygon, itinerary: Sequence[int], start: BoundaryPoint,
           theta: float) -> Unfolding:
    """Unfold the trajectory leaving `start` along the cyclic word `itinerary`.

    The word starts with start.side; one leg is produced per letter, the last
    one returning to the first side.
    """
    word = [int(c) for c in getattr(itinerary, "word", itinerary)]
    if not word or word[0] != start.side:
        raise IllegalItineraryError(f"itinerary must start on side {start.side}")
    if not start.is_interior(polygon):
        raise VertexStartError(f"unfolding starts at a corner of side {start.side}")
    if abs(theta) >= HALF_PI - THETA_TOL:
        raise GrazingRayError(f"grazing angle {theta:.12g}")

    slack = polygon.vertex_slack
    origin = polygon.xy(start)
    direction = polygon.direction(start.side, theta)
    matrix = np.eye(3)
    t_prev = 0.0
    exclude = start.side - 1
    isometries, crossings, sides = [], [], []

    for step, target in enumerate(word[1:] + word[:1], start=1):
        copy = _apply(matrix, polygon.vertices)
        found = _first_crossing(copy, origin, direction, t_prev + slack, slack, exclude)
        if found is None or found[0] != target - 1:
            raise IllegalItineraryError(
                f"straightened line misses the image of side {target} at leg {step}",
                context={"leg": step, "side": target})
        k, t, s = found
        if min(s, polygon.side_lengths[k] - s) <= slack:
            raise VertexCrossingError(f"straightened line passes a corner at leg {step}",
                                      context={"leg": step, "side": target})
        isometries.append(matrix)
        crossings.append(origin + t * direction)
        sides.append(target)
        edge = copy[(k + 1) % polygon.d] - copy[k]
        matrix = _reflection(copy[k], edge / np.linalg.norm(edge)) @ matrix
        t_prev = t
        exclude = k

    return Unfolding(origin, direction, tuple(isometries), tuple(crossings), tuple(sides))
