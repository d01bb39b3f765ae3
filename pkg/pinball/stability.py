"""
lambda-stability of periodic cylinders.

A cylinder is lambda-stable when pinball periodic orbits with its itinerary
converge to one of its orbits as lambda -> 1. Odd orbits and ping-pong orbits
always are. For an even cylinder the departure angle is forced, and the test
compares Omega_0 * L with the alternating moments sum_k (-1)^k theta_k L_k(s)
at the two ends of the base interval: strictly between them means stable,
outside means not.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import STRICT_MARGIN, UNIT_LAMBDA_TOL
from .cylinder import (
    NECESSARY_TOL,
    Cylinder,
    affine_return_map,
    alternating_beta_sum,
    base_interval,
    build_cylinder,
    departure_angle,
    theta_sequence,
)
from .dynamics import CLOSING_TOL, PhasePoint, solve_periodic_point, trace_word
from .exceptions import (
    AngleOverflowError,
    BadParameterError,
    EmptyIntervalError,
    InvalidBracketError,
    OddPeriodError,
    ParallelLinesError,
    PingPongWordError,
    PinballError,
    SlopeOneError,
)
from .geometry import Polygon, build_polygon, cast_ray
from .itinerary import Itinerary, as_itinerary
from .utils import default_worker_count, format_number

logger = logging.getLogger(__name__)


class Verdict(Enum):
    LAMBDA_STABLE = "LambdaStable"
    NOT_LAMBDA_STABLE = "NotLambdaStable"
    INCONCLUSIVE = "Inconclusive"
    PING_PONG = "PingPong"
    ODD_PERIOD = "OddPeriod"
    NO_SUCH_ORBIT = "NoSuchOrbit"

    @property
    def is_lambda_stable(self) -> bool:
        return self in (Verdict.LAMBDA_STABLE, Verdict.PING_PONG, Verdict.ODD_PERIOD)


@dataclass
class StabilityReport:
    """Verdict on one itinerary plus the numbers that support it"""
    polygon: str
    itinerary: Itinerary
    verdict: Verdict
    reason: str
    gsv_stable: bool
    alternating_sum: Optional[float] = None
    departure_angle: Optional[float] = None
    omega0: Optional[float] = None
    total_length: Optional[float] = None
    omega0_L: Optional[float] = None
    sum_left: Optional[float] = None
    sum_right: Optional[float] = None
    derivative_left: Optional[float] = None
    derivative_right: Optional[float] = None
    base_interval: Optional[Tuple[float, float]] = None
    bracket: Optional[Tuple[float, float]] = None
    base_point: Optional[float] = None
    periodic_angle: Optional[float] = None

    @property
    def is_lambda_stable(self) -> bool:
        return self.verdict.is_lambda_stable

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["itinerary"] = str(self.itinerary)
        data["verdict"] = self.verdict.value
        return data

    def format_text(self) -> str:
        rows: List[Tuple[str, str]] = [
            ("polygon", self.polygon),
            ("itinerary", str(self.itinerary)),
            ("period", str(self.itinerary.period)),
            ("verdict", self.verdict.value),
            ("reason", self.reason),
            ("gsv_stable", "yes" if self.gsv_stable else "no"),
        ]
        for label, value in (
            ("alternating_sum", self.alternating_sum),
            ("departure_angle", self.departure_angle),
            ("omega0", self.omega0),
            ("total_length", self.total_length),
            ("omega0_L", self.omega0_L),
            ("sum_left", self.sum_left),
            ("sum_right", self.sum_right),
            ("derivative_left", self.derivative_left),
            ("derivative_right", self.derivative_right),
            ("base_point", self.base_point),
            ("periodic_angle", self.periodic_angle),
        ):
            rows.append((label, format_number(value)))
        for label, pair in (("base_interval", self.base_interval), ("bracket", self.bracket)):
            rows.append((label, "-" if pair is None
                         else f"({format_number(pair[0])}, {format_number(pair[1])})"))
        width = max(len(label) for label, _ in rows)
        return "".join(f"{label.ljust(width)}  {value}\n" for label, value in rows)


@dataclass(frozen=True)
class SufficientCheck:
    holds: bool
    sum_a: float
    omega0_L: float
    sum_b: float


@dataclass(frozen=True)
class ContinuationRow:
    lam: float
    s0: float
    theta0: float
    residual: float
    legal: bool

    def csv_fields(self) -> List[str]:
        return [format_number(self.lam), format_number(self.s0), format_number(self.theta0),
                format_number(self.residual), "true" if self.legal else "false"]


CONTINUATION_HEADER = "lambda,s0,theta0,residual,legal"


@dataclass(frozen=True)
class AdmissibleSlope:
    """Slope p/(q w) of the rectangle; its mirror image -p/(q w) is admitted with it"""
    p: int
    q: int
    slope: float

    @property
    def signed_slopes(self) -> Tuple[float, ...]:
        return (self.slope,) if self.p == 0 else (self.slope, -self.slope)


def gsv_check(itinerary: Itinerary) -> bool:
    """Stability under polygon deformation: odd words always, even words iff i0 - i1 + ... = 0"""
    itinerary = as_itinerary(itinerary)
    if not itinerary.is_even:
        return True
    return itinerary.letter_alternating_sum == 0


def slope_derivative(polygon: Polygon, itinerary: Itinerary, s: float) -> float:
    """dF_2n/d lambda at (s, 1)"""
    cylinder = build_cylinder(polygon, as_itinerary(itinerary))
    return _derivative(cylinder, s)


def _derivative(cylinder: Cylinder, s: float) -> float:
    return (cylinder.omega0 * cylinder.total_length - cylinder.alternating_moment(s)) \
        / math.cos(cylinder.departure)


def sufficient_check(polygon: Polygon, itinerary: Itinerary, a: float, b: float,
                     margin: float = STRICT_MARGIN) -> SufficientCheck:
    """sum(a) < Omega_0 L < sum(b), each gap wider than margin"""
    cylinder = build_cylinder(polygon, as_itinerary(itinerary))
    interval = cylinder.base_interval
    if not a < b:
        raise InvalidBracketError(f"bracket ({a:.12g}, {b:.12g}) is empty")
    if not (interval.contains(a) and interval.contains(b)):
        raise InvalidBracketError(
            f"bracket ({a:.12g}, {b:.12g}) leaves [{interval.left:.12g}, {interval.right:.12g}]")
    sum_a = cylinder.alternating_moment(a)
    sum_b = cylinder.alternating_moment(b)
    target = cylinder.omega0 * cylinder.total_length
    return SufficientCheck(sum_a + margin < target < sum_b - margin, sum_a, target, sum_b)


def _limit_base_point(cylinder: Cylinder) -> float:
    """Zero of the affine s -> dF/d lambda (s, 1); the lambda -> 1 limit of s0(lambda)"""
    interval = cylinder.base_interval
    d_left = _derivative(cylinder, interval.left)
    d_right = _derivative(cylinder, interval.right)
    if d_left == d_right:
        raise SlopeOneError(f"{cylinder.itinerary}: dF/d lambda is constant on the cylinder")
    return interval.left + interval.width * d_left / (d_left - d_right)


def stable_base_point(polygon: Polygon, itinerary: Itinerary) -> float:
    """Base point of the billiard orbit that pinball orbits converge to"""
    cylinder = build_cylinder(polygon, as_itinerary(itinerary))
    s0 = _limit_base_point(cylinder)
    if not cylinder.base_interval.contains(s0, closed=False):
        raise InvalidBracketError(f"{itinerary}: limit point {s0:.12g} outside the base interval")
    return s0


def locate_odd_orbit(polygon: Polygon, itinerary: Itinerary, lam: float = 1.0) -> PhasePoint:
    """The periodic point of an odd word, checked against the real dynamics"""
    itinerary = as_itinerary(itinerary)
    itinerary.check_sides(polygon.d)
    if itinerary.is_even:
        raise PinballError(f"{itinerary} has even period")
    start = solve_periodic_point(polygon, itinerary, lam)
    try:
        _, residual = trace_word(polygon, itinerary, start, lam)
    except PinballError as e:
        raise EmptyIntervalError(f"{itinerary}: odd periodic point is not realized ({e})") from e
    if residual > CLOSING_TOL:
        raise EmptyIntervalError(f"{itinerary}: odd periodic point does not close")
    return start


def _realizes(polygon: Polygon, itinerary: Itinerary, s: float, theta: float, lam: float) -> bool:
    if not math.isfinite(s):
        return False
    try:
        _, residual = trace_word(polygon, itinerary, PhasePoint.at(itinerary[0], s, theta), lam)
    except PinballError:
        return False
    return residual <= CLOSING_TOL


def classify(polygon: Polygon, itinerary: Itinerary, margin: float = STRICT_MARGIN) -> StabilityReport:
    """Decide lambda-stability of the cylinder (or odd orbit) with this itinerary"""
    itinerary = as_itinerary(itinerary)
    itinerary.check_sides(polygon.d)
    report = StabilityReport(polygon.name, itinerary, Verdict.NO_SUCH_ORBIT, "",
                             gsv_stable=gsv_check(itinerary))
    if not itinerary.is_even:
        return _classify_odd(polygon, itinerary, report)
    if itinerary.period == 2:
        return _classify_ping_pong(polygon, itinerary, report)

    report.alternating_sum = alternating_beta_sum(polygon, itinerary)
    if abs(report.alternating_sum) > NECESSARY_TOL:
        report.reason = "alternating beta sum does not vanish"
        return report
    report.departure_angle = departure_angle(polygon, itinerary)
    try:
        cylinder = build_cylinder(polygon, itinerary)
    except EmptyIntervalError as e:
        report.reason = f"no cylinder at the departure angle: {e.message}"
        return report

    interval = cylinder.base_interval
    report.base_interval = (interval.left, interval.right)
    report.omega0 = cylinder.omega0
    report.total_length = cylinder.total_length
    report.omega0_L = cylinder.omega0 * cylinder.total_length
    report.sum_left = cylinder.alternating_moment(interval.left)
    report.sum_right = cylinder.alternating_moment(interval.right)
    report.derivative_left = _derivative(cylinder, interval.left)
    report.derivative_right = _derivative(cylinder, interval.right)

    below = report.sum_left + margin < report.omega0_L
    above = report.omega0_L < report.sum_right - margin
    if below and above:
        report.verdict = Verdict.LAMBDA_STABLE
        report.reason = "Omega0*L lies strictly between the endpoint sums"
        report.bracket = (interval.left, interval.right)
        report.base_point = _limit_base_point(cylinder)
        report.periodic_angle = cylinder.departure
    elif (report.omega0_L < report.sum_left - margin) or (report.omega0_L > report.sum_right + margin):
        report.verdict = Verdict.NOT_LAMBDA_STABLE
        report.reason = "endpoint derivatives share a sign"
    else:
        report.verdict = Verdict.INCONCLUSIVE
        report.reason = "Omega0*L within margin of an endpoint sum"
    logger.debug("%s on %s: %s", itinerary, polygon.name, report.verdict.value)
    return report


def _classify_ping_pong(polygon: Polygon, itinerary: Itinerary,
                        report: StabilityReport) -> StabilityReport:
    i, j = itinerary.word
    report.alternating_sum = 2.0 * polygon.beta_of(i, j)
    if abs(polygon.beta_of(i, j)) > NECESSARY_TOL:
        report.reason = f"sides {i} and {j} are not opposite parallel sides"
        return report
    try:
        interval = base_interval(polygon, itinerary)
    except EmptyIntervalError as e:
        report.reason = f"no perpendicular segment joins the sides: {e.message}"
        return report
    report.verdict = Verdict.PING_PONG
    report.reason = "perpendicular bounce between parallel sides"
    report.departure_angle = 0.0
    report.periodic_angle = 0.0
    report.base_interval = (interval.left, interval.right)
    return report


def _classify_odd(polygon: Polygon, itinerary: Itinerary,
                  report: StabilityReport) -> StabilityReport:
    try:
        start = locate_odd_orbit(polygon, itinerary, 1.0)
    except PinballError as e:
        report.reason = f"odd word not realized: {e.message}"
        return report
    report.verdict = Verdict.ODD_PERIOD
    report.reason = "odd periodic orbits are lambda-stable"
    report.base_point = start.s
    report.periodic_angle = start.theta
    return report


def classify_many(polygon: Polygon, itineraries: Iterable[Itinerary],
                  max_workers: Optional[int] = None,
                  margin: float = STRICT_MARGIN) -> List[StabilityReport]:
    """classify() over many words; reports ordered by canonical word"""
    words = [as_itinerary(it) for it in itineraries]
    with ThreadPoolExecutor(max_workers=max_workers or default_worker_count()) as executor:
        reports = list(executor.map(lambda it: classify(polygon, it, margin), words))
    return sorted(reports, key=lambda r: (r.itinerary.canonical().word, r.itinerary.word))


def continue_orbit(polygon: Polygon, itinerary: Itinerary,
                   lambda_grid: Sequence[float]) -> List[ContinuationRow]:
    """Fixed point s0(lambda) of the affine return map for every lambda in the grid"""
    itinerary = as_itinerary(itinerary)
    itinerary.check_sides(polygon.d)
    if not itinerary.is_even:
        raise OddPeriodError(f"{itinerary} has odd period; use locate_odd_orbit")
    if itinerary.period == 2:
        raise PingPongWordError(f"{itinerary} is a ping-pong word")
    # raises NecessaryConditionFailedError before any row is produced
    departure = float(theta_sequence(polygon, itinerary, 1.0)[0])
    try:
        cylinder: Optional[Cylinder] = build_cylinder(polygon, itinerary)
    except EmptyIntervalError:
        cylinder = None

    nan = float("nan")
    rows = []
    for lam in lambda_grid:
        lam = float(lam)
        if not lam > 0.0:
            raise BadParameterError(f"lambda must be positive, got {lam}")
        if abs(lam - 1.0) <= UNIT_LAMBDA_TOL:
            if cylinder is None:
                rows.append(ContinuationRow(lam, nan, departure, nan, False))
                continue
            try:
                s0 = _limit_base_point(cylinder)
            except SlopeOneError:
                rows.append(ContinuationRow(lam, nan, departure, nan, False))
                continue
            identity = affine_return_map(polygon, itinerary, 1.0)
            legal = cylinder.base_interval.contains(s0, closed=False) and \
                _realizes(polygon, itinerary, s0, departure, 1.0)
            rows.append(ContinuationRow(lam, s0, departure, abs(identity(s0) - s0), legal))
            continue
        try:
            theta0 = float(theta_sequence(polygon, itinerary, lam)[0])
            return_map = affine_return_map(polygon, itinerary, lam)
        except (AngleOverflowError, ParallelLinesError) as e:
            logger.debug("No fixed point for %s at lambda=%g: %s", itinerary, lam, e)
            rows.append(ContinuationRow(lam, nan, nan, nan, False))
            continue
        s0 = return_map.fixed_point()
        rows.append(ContinuationRow(lam, s0, theta0, abs(return_map(s0) - s0),
                                    _realizes(polygon, itinerary, s0, theta0, lam)))
    return rows


def parse_lambda_grid(text: str) -> List[float]:
    """"a:b:n" -> n values from a to b inclusive; a single number -> [number]"""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            grid = [float(parts[0])]
        elif len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise BadParameterError(f"lambda grid {text!r} needs at least one point")
            grid = np.linspace(float(parts[0]), float(parts[1]), count).tolist()
        else:
            raise BadParameterError(f"lambda grid {text!r} is not of the form a:b:n")
    except ValueError as e:
        raise BadParameterError(f"cannot parse lambda grid {text!r}") from e
    if any(not lam > 0.0 for lam in grid):
        raise BadParameterError(f"lambda values must be positive in {text!r}")
    return grid


def default_lambda_grid() -> List[float]:
    return parse_lambda_grid("0.9:1.1:41")


def rectangle_admissible_slopes(w: float, max_sum: int) -> List[AdmissibleSlope]:
    """Coprime (p, q) with p + q <= max_sum whose cylinders can be lambda-stable.

    The aspect ratio must equal (p/q) cot(pi p / (2 (p + q))). The ping-pong
    (p = 0) is always listed first. Each entry stands for both slopes +-p/(q w);
    the mirror image in the vertical axis maps one cylinder onto the other.
    """
    if not w > 0.0:
        raise BadParameterError(f"aspect ratio must be positive, got {w}")
    slopes = [AdmissibleSlope(0, 1, 0.0)]
    for total in range(2, max_sum + 1):
        for p in range(1, total):
            q = total - p
            if math.gcd(p, q) != 1:
                continue
            ratio = (p / q) / math.tan(math.pi * p / (2 * total))
            if abs(w - ratio) < 1e-9:
                slopes.append(AdmissibleSlope(p, q, p / (q * w)))
    return slopes


def rectangle(w: float) -> Polygon:
    """w x 1 rectangle; sides bottom, right, top, left"""
    if not w > 0.0:
        raise BadParameterError(f"aspect ratio must be positive, got {w}")
    return build_polygon([(0.0, 0.0), (w, 0.0), (w, 1.0), (0.0, 1.0)], name=f"rectangle({w:.12g})")


def rectangle_cylinder_itinerary(w: float, p: int, q: int, sign: int = 1) -> Itinerary:
    """Word of the cylinder of slope sign * p/(q w) in the w x 1 rectangle, read from the bottom"""
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise BadParameterError(f"(p, q) = ({p}, {q}) must be coprime positive integers")
    if sign not in (1, -1):
        raise BadParameterError(f"sign must be +1 or -1, got {sign}")
    polygon = rectangle(w)
    theta = sign * math.atan2(q * w, p)
    # generic start, away from the diagonals through corners
    position = PhasePoint.at(1, w * (3.0 - math.sqrt(5.0)) / 2.0, theta).position
    sides = [1]
    for _ in range(2 * (p + q) - 1):
        hit = cast_ray(polygon, position, theta)
        theta = polygon.beta_of(position.side, hit.target.side) - theta
        position = hit.target
        sides.append(position.side)
    return Itinerary(tuple(sides))


def rational_multiple_of_pi(angle: float, max_denominator: int = 720,
                            tol: float = 1e-9) -> Optional[Fraction]:
    """angle / pi as a fraction when it is one (to tol)"""
    ratio = Fraction(angle / math.pi).limit_denominator(max_denominator)
    if abs(float(ratio) * math.pi - angle) <= tol:
        return ratio
    return None
