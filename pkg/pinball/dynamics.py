"""
Billiard map, pinball map and empirical search for periodic cycles.

The pinball map scales the reflected angle toward the normal:
Phi_lambda(s, theta) = (s', lambda * (beta - theta)). Its inverse is obtained
from the time-reversal involution S(s, theta) = (s, -theta) together with the
angle scaling R_lambda:

    Phi_lambda^-1 = S o R_lambda o Phi_{1/lambda} o R_{1/lambda} o S
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import THETA_TOL
from .exceptions import (
    AngleOverflowError,
    DynamicsError,
    GeometryError,
    GrazingRayError,
    IllegalItineraryError,
    PinballError,
    SlopeOneError,
    VertexHitError,
)
from .geometry import HALF_PI, BoundaryPoint, Polygon, cast_ray, project
from .itinerary import Itinerary, as_itinerary
from .utils import default_worker_count

logger = logging.getLogger(__name__)

# residual in (s / side length, theta) below which an orbit closes
CLOSING_TOL = 1e-8


@dataclass(frozen=True)
class PhasePoint:
    """Boundary position plus outgoing angle"""
    position: BoundaryPoint
    theta: float

    @classmethod
    def at(cls, side: int, s: float, theta: float) -> "PhasePoint":
        return cls(BoundaryPoint(side, s), theta)

    @property
    def side(self) -> int:
        return self.position.side

    @property
    def s(self) -> float:
        return self.position.s


@dataclass(frozen=True)
class OrbitSegment:
    """Consecutive pinball iterates; itinerary[k] is the side of points[k]"""
    points: Tuple[PhasePoint, ...]
    itinerary: Tuple[int, ...]
    lam: float

    def __post_init__(self) -> None:
        if len(self.points) != len(self.itinerary):
            raise DynamicsError("orbit segment and itinerary lengths differ")

    def __len__(self) -> int:
        return len(self.points)

    def rotated(self, k: int) -> "OrbitSegment":
        k %= len(self.points)
        return OrbitSegment(self.points[k:] + self.points[:k],
                            self.itinerary[k:] + self.itinerary[:k], self.lam)


def _check_lambda(lam: float) -> None:
    if not lam > 0.0 or not math.isfinite(lam):
        raise DynamicsError(f"lambda must be positive, got {lam}", context={"lambda": lam})


def billiard_step(polygon: Polygon, p: PhasePoint) -> PhasePoint:
    """One specular bounce"""
    hit = cast_ray(polygon, p.position, p.theta)
    if hit.is_vertex:
        raise VertexHitError(f"orbit from side {p.side} hits a corner of side {hit.target.side}",
                             context={"side": hit.target.side, "s": hit.target.s})
    theta_out = polygon.beta_of(p.side, hit.target.side) - p.theta
    if abs(theta_out) >= HALF_PI - THETA_TOL:
        raise GrazingRayError(f"grazing reflection on side {hit.target.side}",
                              context={"theta": theta_out})
    return PhasePoint(hit.target, theta_out)


def pinball_step(polygon: Polygon, p: PhasePoint, lam: float) -> PhasePoint:
    """One bounce followed by the angle scaling theta -> lam * theta"""
    _check_lambda(lam)
    q = billiard_step(polygon, p)
    theta = lam * q.theta
    if abs(theta) >= HALF_PI - THETA_TOL:
        raise AngleOverflowError(f"scaled angle {theta:.12g} leaves (-pi/2, pi/2)",
                                 context={"lambda": lam, "theta": q.theta})
    return PhasePoint(q.position, theta)


def involution(p: PhasePoint) -> PhasePoint:
    """Time reversal S(s, theta) = (s, -theta)"""
    return PhasePoint(p.position, -p.theta)


def rescale(p: PhasePoint, lam: float) -> PhasePoint:
    """Angle scaling R_lambda(s, theta) = (s, lambda * theta)"""
    return PhasePoint(p.position, lam * p.theta)


def inverse_pinball_step(polygon: Polygon, p: PhasePoint, lam: float) -> PhasePoint:
    """Preimage of p under the pinball map, through the reversal conjugacy"""
    _check_lambda(lam)
    q = rescale(involution(p), 1.0 / lam)
    if abs(q.theta) >= HALF_PI - THETA_TOL:
        raise AngleOverflowError(f"angle {p.theta:.12g} has no preimage at lambda={lam}",
                                 context={"lambda": lam, "theta": p.theta})
    return involution(rescale(pinball_step(polygon, q, 1.0 / lam), lam))


def rho(theta: float, lam: float) -> float:
    """Expansion factor cos(lam * theta) / cos(theta)"""
    if abs(theta) >= HALF_PI - THETA_TOL or abs(lam * theta) >= HALF_PI - THETA_TOL:
        raise GrazingRayError(f"rho undefined at theta={theta:.12g}, lambda={lam}",
                              context={"theta": theta, "lambda": lam})
    return math.cos(lam * theta) / math.cos(theta)


def branch_step(polygon: Polygon, i: int, j: int, s: float, theta: float,
                lam: float) -> Tuple[float, float, float]:
    """Extended branch R_lambda o Phi_{i,j} on supporting lines.

    Returns (s', theta', t) with t the signed leg length.
    """
    s_next, t = project(polygon, i, j, s, theta)
    return s_next, lam * (polygon.beta_of(i, j) - theta), t


def phase_distance(polygon: Polygon, p: PhasePoint, q: PhasePoint) -> float:
    if p.side != q.side:
        return math.inf
    return max(abs(p.s - q.s) / polygon.side_length(p.side), abs(p.theta - q.theta))


def orbit(polygon: Polygon, p: PhasePoint, lam: float, steps: int) -> OrbitSegment:
    """p followed by `steps` pinball iterates"""
    points = [p]
    for _ in range(steps):
        points.append(pinball_step(polygon, points[-1], lam))
    return OrbitSegment(tuple(points), tuple(q.side for q in points), lam)


def trace_word(polygon: Polygon, itinerary: Itinerary, start: PhasePoint,
               lam: float) -> Tuple[OrbitSegment, float]:
    """Follow one period of `itinerary` from `start`.

    Returns the period as an OrbitSegment and the closing residual. Raises
    IllegalItineraryError when the orbit leaves the word, or the step error
    when it hits a corner or overflows.
    """
    if start.side != itinerary[0]:
        raise IllegalItineraryError(f"orbit starts on side {start.side}, word on {itinerary[0]}")
    points = [start]
    p = start
    for k in range(1, itinerary.period + 1):
        p = pinball_step(polygon, p, lam)
        if p.side != itinerary[k]:
            raise IllegalItineraryError(
                f"orbit visits side {p.side} where the word has {itinerary[k]}",
                context={"step": k, "word": itinerary.word})
        if k < itinerary.period:
            points.append(p)
    segment = OrbitSegment(tuple(points), itinerary.word, lam)
    return segment, phase_distance(polygon, start, p)


def solve_periodic_point(polygon: Polygon, itinerary: Itinerary, lam: float) -> PhasePoint:
    """Closed-form periodic point of the extended branches along `itinerary`.

    The angle recursion theta -> lam * (beta - theta) is affine with slope
    (-lam)^p; the position return map along the resulting angles is affine
    too. Both fixed points are unique when they exist. The point lies on
    supporting lines and need not realize the word; check with trace_word.
    """
    _check_lambda(lam)
    word = as_itinerary(itinerary)
    p = word.period
    offset = 0.0
    for i, j in word.transitions:
        offset = lam * (polygon.beta_of(i, j) - offset)
    angle_slope = (-lam) ** p
    if abs(1.0 - angle_slope) < 1e-14:
        raise SlopeOneError(f"angle map of {word} has slope one at lambda={lam}")
    theta0 = offset / (1.0 - angle_slope)

    slope, intercept, theta = 1.0, 0.0, theta0
    for i, j in word.transitions:
        if abs(theta) >= HALF_PI - THETA_TOL:
            raise AngleOverflowError(f"periodic angle {theta:.12g} of {word} leaves (-pi/2, pi/2)")
        at0 = branch_step(polygon, i, j, 0.0, theta, lam)
        at1 = branch_step(polygon, i, j, 1.0, theta, lam)
        a, b = at1[0] - at0[0], at0[0]
        slope, intercept = a * slope, a * intercept + b
        theta = at0[1]
    if abs(1.0 - slope) < 1e-12:
        raise SlopeOneError(f"position map of {word} has slope one at lambda={lam}")
    return PhasePoint.at(word[0], intercept / (1.0 - slope), theta0)


@dataclass(frozen=True)
class GeneralizedDiagonal:
    """Billiard trajectory from a start point up to the corner it runs into"""
    points: Tuple[BoundaryPoint, ...]
    corner: BoundaryPoint

    @property
    def legs(self) -> int:
        return len(self.points)


def generalized_diagonal(polygon: Polygon, start: BoundaryPoint, theta: float,
                         max_steps: int) -> GeneralizedDiagonal:
    """Follow the billiard from `start` (a corner is allowed) until a corner is hit"""
    length = polygon.side_length(start.side)
    position = BoundaryPoint(start.side, min(max(start.s, 0.0), length))
    points = [position]
    for _ in range(max_steps):
        hit = cast_ray(polygon, position, theta, allow_corner=True)
        if hit.is_vertex:
            return GeneralizedDiagonal(tuple(points), hit.target)
        theta = polygon.beta_of(position.side, hit.target.side) - theta
        position = hit.target
        points.append(position)
    raise GeometryError(f"no corner reached within {max_steps} bounces",
                        context={"side": start.side, "s": start.s})


# --- cycle search ---------------------------------------------------------

def _sample_phase_point(polygon: Polygon, rng: np.random.Generator) -> PhasePoint:
    side = int(rng.choice(polygon.d, p=polygon.side_lengths / polygon.perimeter)) + 1
    length = polygon.side_length(side)
    s = 0.0
    while not 0.0 < s < length:
        s = float(rng.uniform(0.0, length))
    theta = float(rng.uniform(-HALF_PI + THETA_TOL, HALF_PI - THETA_TOL))
    return PhasePoint.at(side, s, theta)


def _recurrences(polygon: Polygon, lam: float, seed: np.random.SeedSequence, transient: int,
                 record_steps: int, max_period: int,
                 capture_tol: float) -> Dict[Tuple[int, ...], PhasePoint]:
    """Words the orbit of one random sample nearly repeats, with the closest state"""
    rng = np.random.default_rng(seed)
    p = _sample_phase_point(polygon, rng)
    try:
        for _ in range(transient):
            p = pinball_step(polygon, p, lam)
        history = [p]
        for _ in range(record_steps):
            history.append(pinball_step(polygon, history[-1], lam))
    except (GeometryError, DynamicsError) as e:
        # corner hits are a measure-zero event; drop the sample
        logger.debug("Discarding sample: %s", e)
        return {}

    sides = [q.side for q in history]
    found: Dict[Tuple[int, ...], Tuple[float, PhasePoint]] = {}
    for period in range(2, max_period + 1):
        for k in range(len(history) - period):
            if sides[k] != sides[k + period]:
                continue
            gap = phase_distance(polygon, history[k], history[k + period])
            if gap < capture_tol:
                word = tuple(sides[k:k + period])
                if word not in found or gap < found[word][0]:
                    found[word] = (gap, history[k])
    return {word: state for word, (_, state) in found.items()}


def _refine(polygon: Polygon, word: Tuple[int, ...], state: PhasePoint,
            lam: float) -> Optional[OrbitSegment]:
    itinerary = Itinerary(word)
    if not itinerary.is_primitive:
        return None
    try:
        start = solve_periodic_point(polygon, itinerary, lam)
    except SlopeOneError:
        # neutral families (ping-pong): the attracted state itself must close
        start = state
    except PinballError as e:
        logger.debug("No periodic point for %s: %s", itinerary, e)
        return None
    try:
        segment, residual = trace_word(polygon, itinerary, start, lam)
    except PinballError as e:
        logger.debug("Candidate %s rejected: %s", itinerary, e)
        return None
    if residual >= CLOSING_TOL:
        return None
    return segment.rotated(itinerary.canonical_offset())


def find_attracting_cycles(polygon: Polygon, lam: float, n_samples: int = 1000,
                           transient: int = 10000, max_period: int = 8, seed: int = 0,
                           record_steps: int = 2000, capture_tol: float = 5e-2,
                           max_workers: Optional[int] = None
                           ) -> List[Tuple[Itinerary, OrbitSegment]]:
    """Periodic cycles visited by typical pinball orbits.

    Each sample is iterated through the transient, then its recorded orbit is
    scanned for near recurrences of period <= max_period. Every recurring word
    is refined to the exact periodic point and kept only if that point closes
    to CLOSING_TOL. Samples use independent child seeds, so the result does
    not depend on max_workers.
    """
    if not 0.0 < lam < 1.0:
        raise DynamicsError(f"cycle search needs lambda in (0, 1), got {lam}")
    children = np.random.SeedSequence(seed).spawn(n_samples)
    workers = max_workers or default_worker_count()

    def run(child: np.random.SeedSequence) -> Dict[Tuple[int, ...], PhasePoint]:
        return _recurrences(polygon, lam, child, transient, record_steps, max_period, capture_tol)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        per_sample = list(executor.map(run, children))

    candidates: Dict[Tuple[int, ...], PhasePoint] = {}
    for found in per_sample:
        for word, state in found.items():
            candidates.setdefault(word, state)

    # rotations of one cycle share the canonical word
    cycles: Dict[Tuple[int, ...], OrbitSegment] = {}
    for word in sorted(candidates):
        segment = _refine(polygon, word, candidates[word], lam)
        if segment is not None:
            cycles.setdefault(segment.itinerary, segment)

    result = [(Itinerary(word), cycles[word]) for word in sorted(cycles)]
    logger.info("Cycle search on %s at lambda=%g: %d samples, %d cycles",
                polygon.name, lam, n_samples, len(result))
    return result
