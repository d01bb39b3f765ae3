"""
Periodic cylinders of even period.

For an even word i_0 .. i_{2n-1} with beta_k = beta(i_k, i_{k+1}) the
pinball angles along a periodic orbit are fixed by the word:

    theta_0(lam) = sum_k (-lam)^(2n-k) beta_k / (lam^2n - 1)
    theta_{k+1}(lam) = lam * (beta_k - theta_k(lam))

theta_0 has a removable singularity at lam = 1 exactly when the
alternating beta sum vanishes; its value there is the departure angle.
Along these angles the first-return position map F(s, lam) is affine.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .config import CLOSURE_TOL, THETA_TOL, UNIT_LAMBDA_TOL
from .dynamics import (
    CLOSING_TOL,
    GeneralizedDiagonal,
    PhasePoint,
    branch_step,
    generalized_diagonal,
    trace_word,
)
from .exceptions import (
    AngleOverflowError,
    EmptyIntervalError,
    NecessaryConditionFailedError,
    OddPeriodError,
    OutsideBaseError,
    ParallelLinesError,
    PingPongWordError,
    PinballError,
    SlopeOneError,
)
from .geometry import HALF_PI, BoundaryPoint, Polygon
from .itinerary import Itinerary, as_itinerary

logger = logging.getLogger(__name__)

# |alternating beta sum| below this counts as zero
NECESSARY_TOL = 1e-10

__all__ = [
    "AffineMap1D", "BaseInterval", "Cylinder", "Itinerary", "PathLengths",
    "affine_return_map", "alternating_beta_sum", "base_interval", "build_cylinder",
    "departure_angle", "leg_maps", "omega0", "path_lengths", "theta_sequence",
    "transition_betas",
]


@dataclass(frozen=True)
class AffineMap1D:
    """s -> slope * s + intercept"""
    slope: float
    intercept: float

    def __call__(self, s: float) -> float:
        return self.slope * s + self.intercept

    def after(self, inner: "AffineMap1D") -> "AffineMap1D":
        """self o inner"""
        return AffineMap1D(self.slope * inner.slope, self.slope * inner.intercept + self.intercept)

    def fixed_point(self) -> float:
        if abs(1.0 - self.slope) < 1e-14:
            raise SlopeOneError(f"affine map with slope {self.slope!r} has no isolated fixed point")
        return self.intercept / (1.0 - self.slope)


IDENTITY = AffineMap1D(1.0, 0.0)


def _even(polygon: Polygon, itinerary: Itinerary) -> Itinerary:
    itinerary = as_itinerary(itinerary)
    itinerary.check_sides(polygon.d)
    if not itinerary.is_even:
        raise OddPeriodError(f"{itinerary} has odd period {itinerary.period}",
                             context={"word": itinerary.word})
    return itinerary


def transition_betas(polygon: Polygon, itinerary: Itinerary) -> np.ndarray:
    """beta(i_k, i_{k+1}) for k = 0..p-1"""
    itinerary = as_itinerary(itinerary)
    itinerary.check_sides(polygon.d)
    return np.array([polygon.beta_of(i, j) for i, j in itinerary.transitions])


def _signs(p: int) -> np.ndarray:
    return np.where(np.arange(p) % 2 == 0, 1.0, -1.0)


def alternating_beta_sum(polygon: Polygon, itinerary: Itinerary) -> float:
    """sum_k (-1)^k beta_k; zero is necessary for a periodic orbit"""
    itinerary = _even(polygon, itinerary)
    betas = transition_betas(polygon, itinerary)
    return float(np.dot(_signs(len(betas)), betas))


def departure_angle(polygon: Polygon, itinerary: Itinerary) -> float:
    """(1/2n) sum_k (-1)^(k+1) k beta_k"""
    itinerary = _even(polygon, itinerary)
    betas = transition_betas(polygon, itinerary)
    p = len(betas)
    k = np.arange(p)
    return float(np.dot(-_signs(p) * k, betas) / p)


def omega0(polygon: Polygon, itinerary: Itinerary) -> float:
    """d theta_0 / d lambda at lambda = 1: (1/4n) sum_k (-1)^(k+1) k (2n-k) beta_k"""
    itinerary = _even(polygon, itinerary)
    betas = transition_betas(polygon, itinerary)
    p = len(betas)
    k = np.arange(p)
    return float(np.dot(-_signs(p) * k * (p - k), betas) / (2 * p))


def theta_sequence(polygon: Polygon, itinerary: Itinerary, lam: float) -> np.ndarray:
    """theta_0(lam) .. theta_2n(lam); the last entry repeats the first"""
    itinerary = _even(polygon, itinerary)
    if not lam > 0.0:
        raise PinballError(f"lambda must be positive, got {lam}")
    betas = transition_betas(polygon, itinerary)
    p = len(betas)
    alternating = float(np.dot(_signs(p), betas))

    if abs(lam - 1.0) <= UNIT_LAMBDA_TOL:
        if abs(alternating) > NECESSARY_TOL:
            raise NecessaryConditionFailedError(
                f"{itinerary}: alternating beta sum {alternating:.12g} is not zero",
                context={"alternating_sum": alternating})
        theta0 = departure_angle(polygon, itinerary)
    else:
        # numerator coefficients by power of lambda: beta_k (-1)^(p-k) at lam^(p-k)
        numerator = np.zeros(p + 1)
        for k, beta in enumerate(betas):
            numerator[p - k] += beta * (-1.0) ** (p - k)
        if abs(alternating) <= NECESSARY_TOL:
            quotient, _ = P.polydiv(numerator, np.array([-1.0, 1.0]))
            theta0 = float(P.polyval(lam, quotient) / P.polyval(lam, np.ones(p)))
        else:
            theta0 = float(P.polyval(lam, numerator) / (lam ** p - 1.0))

    thetas = np.empty(p + 1)
    thetas[0] = theta0
    for k, beta in enumerate(betas):
        thetas[k + 1] = lam * (beta - thetas[k])
    bad = np.flatnonzero(np.abs(thetas) >= HALF_PI - THETA_TOL)
    if bad.size:
        k = int(bad[0])
        raise AngleOverflowError(
            f"{itinerary}: theta_{k}({lam:.12g}) = {thetas[k]:.12g} leaves (-pi/2, pi/2)",
            context={"k": k, "lambda": lam})
    return thetas


def leg_maps(polygon: Polygon, itinerary: Itinerary, thetas: np.ndarray,
             lam: float) -> List[AffineMap1D]:
    """Affine position map of every leg along the given departure angles"""
    maps = []
    for k, (i, j) in enumerate(as_itinerary(itinerary).transitions):
        at0 = branch_step(polygon, i, j, 0.0, float(thetas[k]), lam)[0]
        at1 = branch_step(polygon, i, j, 1.0, float(thetas[k]), lam)[0]
        maps.append(AffineMap1D(at1 - at0, at0))
    return maps


def affine_return_map(polygon: Polygon, itinerary: Itinerary, lam: float) -> AffineMap1D:
    """F_2n(., lam) on side i_0 coordinates"""
    itinerary = _even(polygon, itinerary)
    if itinerary.period == 2:
        raise PingPongWordError(f"{itinerary} is a period-2 word; use the ping-pong test")
    thetas = theta_sequence(polygon, itinerary, lam)
    result = IDENTITY
    for leg in leg_maps(polygon, itinerary, thetas, lam):
        result = leg.after(result)
    return result


@dataclass(frozen=True)
class BaseInterval:
    """Open interval (left, right) of base points on side i_0"""
    left: float
    right: float
    left_diagonal: Optional[GeneralizedDiagonal] = None
    right_diagonal: Optional[GeneralizedDiagonal] = None

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)

    def contains(self, s: float, closed: bool = True) -> bool:
        slack = CLOSURE_TOL * max(1.0, abs(self.left), abs(self.right))
        if closed:
            return self.left - slack <= s <= self.right + slack
        return self.left < s < self.right


def _constraint(lo: float, hi: float, leg: AffineMap1D, length: float) -> Tuple[float, float]:
    """Restrict (lo, hi) to the s with 0 < leg(s) < length"""
    a, b = leg.slope, leg.intercept
    ends = sorted(((0.0 - b) / a, (length - b) / a))
    return max(lo, ends[0]), min(hi, ends[1])


def _obstruction_cuts(polygon: Polygon, itinerary: Itinerary, thetas: np.ndarray,
                      prefixes: List[AffineMap1D], lo: float, hi: float) -> List[float]:
    """Base coordinates in (lo, hi) whose orbit runs into a corner of the polygon"""
    slack = polygon.vertex_slack
    cuts = []
    for k, (i, j) in enumerate(itinerary.transitions):
        theta = float(thetas[k])
        u = polygon.directions[i - 1]
        d = polygon.direction(i, theta)
        w = polygon.vertices - polygon.vertices[i - 1]
        denom = u[0] * d[1] - u[1] * d[0]
        s_k = (w[:, 0] * d[1] - w[:, 1] * d[0]) / denom
        t = (u[0] * w[:, 1] - u[1] * w[:, 0]) / denom
        prefix = prefixes[k]
        for s_side, t_vertex in zip(s_k, t):
            if t_vertex <= slack:
                continue
            s = (float(s_side) - prefix.intercept) / prefix.slope
            if not lo + slack < s < hi - slack:
                continue
            if t_vertex < branch_step(polygon, i, j, float(s_side), theta, 1.0)[2] - slack:
                cuts.append(s)
    return sorted(cuts)


def _realizes_word(polygon: Polygon, itinerary: Itinerary, s: float, theta: float) -> bool:
    try:
        _, residual = trace_word(polygon, itinerary, PhasePoint.at(itinerary[0], s, theta), 1.0)
    except PinballError as e:
        logger.debug("%s obstructed at s=%.12g: %s", itinerary, s, e)
        return False
    return residual <= CLOSING_TOL


def base_interval(polygon: Polygon, itinerary: Itinerary) -> BaseInterval:
    """Base points on side i_0 whose billiard orbit at the departure angle realizes the word.

    In a non-convex polygon corners inside the strip split it; the widest
    piece that realizes the word is returned, the leftmost on ties.
    """
    itinerary = _even(polygon, itinerary)
    try:
        thetas = theta_sequence(polygon, itinerary, 1.0)
        legs = leg_maps(polygon, itinerary, thetas, 1.0)
    except (AngleOverflowError, ParallelLinesError) as e:
        raise EmptyIntervalError(f"{itinerary}: no orbit at the departure angle ({e.message})",
                                 context={"word": itinerary.word}) from e

    slack = polygon.vertex_slack
    lo, hi = 0.0, polygon.side_length(itinerary[0])
    partial = IDENTITY
    prefixes = []
    for k, leg in enumerate(legs):
        if k > 0:
            lo, hi = _constraint(lo, hi, partial, polygon.side_length(itinerary[k]))
        prefixes.append(partial)
        partial = leg.after(partial)

    if abs(partial.slope - 1.0) > 1e-9 or abs(partial.intercept) > slack:
        raise EmptyIntervalError(
            f"{itinerary}: return map at the departure angle is not the identity "
            f"(slope {partial.slope:.12g}, shift {partial.intercept:.12g})",
            context={"word": itinerary.word})
    if hi - lo <= slack:
        raise EmptyIntervalError(f"{itinerary}: side constraints leave no base points",
                                 context={"word": itinerary.word})

    # supporting-line constraints miss corners of non-convex polygons
    bounds = [lo, *_obstruction_cuts(polygon, itinerary, thetas, prefixes, lo, hi), hi]
    pieces = [(a, b) for a, b in zip(bounds, bounds[1:])
              if b - a > slack and _realizes_word(polygon, itinerary, 0.5 * (a + b), float(thetas[0]))]
    if not pieces:
        raise EmptyIntervalError(f"{itinerary}: every orbit at the departure angle is obstructed",
                                 context={"word": itinerary.word})
    if len(bounds) > 2:
        logger.debug("%s on %s: strip split at %s, %d pieces realize the word",
                     itinerary, polygon.name, bounds[1:-1], len(pieces))
    lo, hi = max(pieces, key=lambda piece: (piece[1] - piece[0], -piece[0]))

    diagonals = []
    for end in (lo, hi):
        try:
            diagonals.append(generalized_diagonal(polygon, BoundaryPoint(itinerary[0], end),
                                                  float(thetas[0]), itinerary.period))
        except PinballError as e:
            logger.debug("No generalized diagonal from s=%.12g for %s: %s", end, itinerary, e)
            diagonals.append(None)
    return BaseInterval(lo, hi, diagonals[0], diagonals[1])


@dataclass(frozen=True)
class PathLengths:
    """Cumulative leg lengths L_1 .. L_2n"""
    lengths: np.ndarray

    @property
    def total(self) -> float:
        return float(self.lengths[-1])


def _path_lengths(polygon: Polygon, itinerary: Itinerary, thetas: np.ndarray,
                  s: float) -> PathLengths:
    legs = []
    for k, (i, j) in enumerate(itinerary.transitions):
        s, _, t = branch_step(polygon, i, j, s, float(thetas[k]), 1.0)
        legs.append(t)
    return PathLengths(np.cumsum(legs))


@dataclass(frozen=True, eq=False)
class Cylinder:
    """Even periodic cylinder with its limit angles and length tables"""
    polygon: Polygon
    itinerary: Itinerary
    theta_hat: np.ndarray
    base_interval: BaseInterval
    lengths_l: np.ndarray
    lengths_r: np.ndarray
    total_length: float
    omega0: float

    @property
    def departure(self) -> float:
        return float(self.theta_hat[0])

    @property
    def half_period(self) -> int:
        return self.itinerary.half_period

    @property
    def midpoint(self) -> float:
        return self.base_interval.midpoint

    @property
    def reversed_itinerary(self) -> Itinerary:
        return self.itinerary.reversed()

    def lengths_at(self, s: float) -> PathLengths:
        if not self.base_interval.contains(s):
            raise OutsideBaseError(
                f"s={s:.12g} outside [{self.base_interval.left:.12g}, {self.base_interval.right:.12g}]",
                context={"s": s, "word": self.itinerary.word})
        return _path_lengths(self.polygon, self.itinerary, self.theta_hat, s)

    def alternating_moment(self, s: float) -> float:
        """sum_{k=1}^{2n} (-1)^k theta_k L_k(s)"""
        lengths = self.lengths_at(s).lengths
        p = self.itinerary.period
        signs = np.where(np.arange(1, p + 1) % 2 == 0, 1.0, -1.0)
        return float(np.dot(signs * self.theta_hat[1:], lengths))


@functools.lru_cache(maxsize=512)
def build_cylinder(polygon: Polygon, itinerary: Itinerary) -> Cylinder:
    """Cylinder of an even word; raises EmptyIntervalError when it does not exist"""
    itinerary = _even(polygon, itinerary)
    interval = base_interval(polygon, itinerary)
    thetas = theta_sequence(polygon, itinerary, 1.0)
    left = _path_lengths(polygon, itinerary, thetas, interval.left)
    right = _path_lengths(polygon, itinerary, thetas, interval.right)
    # instances are shared through the cache
    for table in (thetas, left.lengths, right.lengths):
        table.setflags(write=False)
    cylinder = Cylinder(
        polygon=polygon,
        itinerary=itinerary,
        theta_hat=thetas,
        base_interval=interval,
        lengths_l=left.lengths,
        lengths_r=right.lengths,
        total_length=0.5 * (left.total + right.total),
        omega0=omega0(polygon, itinerary),
    )
    logger.debug("Cylinder %s on %s: I=(%.12g, %.12g), L=%.12g", itinerary, polygon.name,
                 interval.left, interval.right, cylinder.total_length)
    return cylinder


def path_lengths(polygon: Polygon, itinerary: Itinerary, s: float) -> PathLengths:
    """L_1(s) .. L_2n(s) for s in the closed base interval"""
    return build_cylinder(polygon, as_itinerary(itinerary)).lengths_at(s)
