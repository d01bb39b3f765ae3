"""
Built-in polygons with their known lambda-stable cylinders.

Each catalog polygon comes with the itineraries whose verdict is known in
closed form, plus the numeric witnesses (departure angle, Omega_0, length
tables, endpoint sums) where they have been worked out. reproduce() checks
the whole list against classify().

Side labels run anticlockwise starting with the horizontal side on the
x-axis, first vertex at the origin.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .cylinder import build_cylinder
from .error_handler import ErrorHandler
from .exceptions import BadParameterError, PinballError, UnknownNameError
from .geometry import Polygon, build_polygon
from .itinerary import Itinerary
from .stability import (
    StabilityReport,
    Verdict,
    classify,
    rectangle,
    rectangle_admissible_slopes,
    rectangle_cylinder_itinerary,
)
from .utils import default_worker_count, ensure_directory_exists, format_number, format_table

logger = logging.getLogger(__name__)
_errors = ErrorHandler("catalog")

PUBLISHED = "published"
DERIVED = "derived"

SQRT3 = math.sqrt(3.0)
SQRT2 = math.sqrt(2.0)
PI = math.pi

# witnesses compared at 1e-12; everything else carries lengths and gets 1e-9
CLOSED_FORM_WITNESSES = frozenset({"departure_angle", "omega0", "theta_sequence"})
CLOSED_FORM_TOL = 1e-12
LENGTH_TOL = 1e-9

POLYGON_NAMES = ("square", "rectangle", "equilateral", "hexagon", "tri306090", "tri454590", "regular")


@dataclass(frozen=True)
class KnownCase:
    """One itinerary with its expected verdict"""
    polygon_name: str
    itinerary: Itinerary
    expected: Verdict
    witnesses: Mapping[str, Any] = field(default_factory=dict)
    provenance: str = PUBLISHED
    note: str = ""


@dataclass
class CaseOutcome:
    case: KnownCase
    report: Optional[StabilityReport]
    mismatches: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def regular_polygon(d: int, name: Optional[str] = None) -> Polygon:
    """Regular d-gon with unit sides"""
    if d < 3:
        raise BadParameterError(f"a regular polygon needs d >= 3, got {d}")
    angles = 2.0 * np.pi * np.arange(d - 1) / d
    steps = np.column_stack([np.cos(angles), np.sin(angles)])
    vertices = np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)])
    return build_polygon(vertices, name=name or f"regular({d})")


def fagnano_itinerary(d: int, m: int, start: int = 1) -> Itinerary:
    """i_{k+1} = i_k + m (mod d) from side `start`"""
    if d < 3:
        raise BadParameterError(f"a regular polygon needs d >= 3, got {d}")
    if not 1 <= m <= d // 2:
        raise BadParameterError(f"Fagnano step must lie in 1..{d // 2}, got {m}")
    period = d // math.gcd(d, m)
    return Itinerary(tuple((start - 1 + k * m) % d + 1 for k in range(period)))


def equilateral() -> Polygon:
    return build_polygon([(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2.0)], name="equilateral")


def tri306090() -> Polygon:
    """Right angle at (1, 0), 30 degrees at the top"""
    return build_polygon([(0.0, 0.0), (1.0, 0.0), (1.0, SQRT3)], name="tri306090")


def tri454590() -> Polygon:
    """Right angle at the origin; side 2 is the diagonal"""
    return build_polygon([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], name="tri454590")


def _word(text: str) -> Itinerary:
    return Itinerary.parse(text)


def _with_reverse(cases: List[KnownCase], provenance: Optional[str] = None) -> List[KnownCase]:
    """Append C^-1 for every case whose reversed word differs"""
    seen = {case.itinerary.word for case in cases}
    result = list(cases)
    for case in cases:
        reverse = case.itinerary.reversed()
        if reverse.word in seen:
            continue
        seen.add(reverse.word)
        result.append(KnownCase(case.polygon_name, reverse, case.expected,
                                provenance=provenance or case.provenance,
                                note=f"reverse of {case.itinerary}"))
    return result


def _equilateral_cases() -> List[KnownCase]:
    name = "equilateral"
    cases = [
        KnownCase(name, _word("1,2,3"), Verdict.ODD_PERIOD, note="Fagnano"),
        KnownCase(name, _word("1,2,1,3"), Verdict.LAMBDA_STABLE, {
            "departure_angle": PI / 3.0,
            "omega0": PI / 6.0,
            "theta_sequence": [PI / 3.0, 0.0, -PI / 3.0, 0.0],
            "total_length": SQRT3,
            "base_interval": [0.0, 1.0],
            "lengths_left": [SQRT3 / 2.0, SQRT3, SQRT3, SQRT3],
            "lengths_right": [0.0, 0.0, SQRT3 / 2.0, SQRT3],
            "sum_left": 0.0,
            "sum_right": PI / SQRT3,
            "omega0_L": PI / (2.0 * SQRT3),
        }, note="perpendicular period four"),
        KnownCase(name, _word("1,2,3,2"), Verdict.LAMBDA_STABLE, {
            "departure_angle": 0.0,
            "omega0": PI / 6.0,
            "theta_sequence": [0.0, PI / 3.0, 0.0, -PI / 3.0],
            "total_length": SQRT3,
            "base_interval": [0.5, 1.0],
            "lengths_left": [SQRT3 / 2.0, SQRT3 / 2.0, SQRT3 / 2.0, SQRT3],
            "lengths_right": [0.0, SQRT3 / 2.0, SQRT3, SQRT3],
            "sum_left": 0.0,
            "sum_right": PI / SQRT3,
        }, provenance=DERIVED, note="rotated image of 1,2,1,3"),
    ]
    return _with_reverse(cases)


def _tri306090_cases() -> List[KnownCase]:
    name = "tri306090"
    cases = [
        KnownCase(name, _word("1,3,2,3,2,3"), Verdict.LAMBDA_STABLE, {
            "departure_angle": 0.0,
            "omega0": -5.0 * PI / 18.0,
            "theta_sequence": [0.0, -PI / 3.0, PI / 6.0, 0.0, -PI / 6.0, PI / 3.0],
            "total_length": 2.0 * SQRT3,
            "lengths_left": [0.0, 2.0 / SQRT3, SQRT3, 4.0 / SQRT3, 2.0 * SQRT3, 2.0 * SQRT3],
            "lengths_right": [SQRT3, SQRT3, SQRT3, SQRT3, SQRT3, 2.0 * SQRT3],
            "sum_left": -7.0 * PI / (3.0 * SQRT3),
            "sum_right": 0.0,
            "omega0_L": -5.0 * PI / (3.0 * SQRT3),
        }, note="perpendicular to the short leg and the diagonal"),
        KnownCase(name, _word("1,2,3,2,3,2,1,3,2,3"), Verdict.LAMBDA_STABLE, {
            "departure_angle": PI / 6.0,
            "omega0": PI / 5.0,
            "theta_sequence": [PI / 6.0, PI / 3.0, -PI / 6.0, 0.0, PI / 6.0,
                               -PI / 3.0, -PI / 6.0, -PI / 6.0, 0.0, PI / 6.0],
            "total_length": 6.0,
            "lengths_left": [2.0, 2.0, 2.0, 2.0, 2.0, 4.0, 4.0, 5.0, 6.0, 6.0],
            "lengths_right": [0.0, 1.0, 1.5, 2.0, 3.0, 3.0, 4.0, 4.5, 5.0, 6.0],
            "sum_left": 0.0,
            "sum_right": 1.5 * PI,
            "omega0_L": 1.2 * PI,
        }, note="perpendicular to the long leg"),
        KnownCase(name, _word("1,2,3,2,1,3"), Verdict.LAMBDA_STABLE, {
            "departure_angle": PI / 3.0,
            "omega0": PI / 6.0,
            "theta_sequence": [PI / 3.0, PI / 6.0, 0.0, -PI / 6.0, -PI / 3.0, 0.0],
            "total_length": 2.0 * SQRT3,
            "lengths_left": [2.0 / SQRT3, SQRT3, 4.0 / SQRT3, 2.0 * SQRT3, 2.0 * SQRT3, 2.0 * SQRT3],
            "lengths_right": [0.0, SQRT3 / 2.0, SQRT3, SQRT3, 1.5 * SQRT3, 2.0 * SQRT3],
            "sum_left": PI / (3.0 * SQRT3),
            "sum_right": SQRT3 * PI / 2.0,
            "omega0_L": PI / SQRT3,
        }, note="perpendicular to the diagonal"),
    ]
    return _with_reverse(cases)


def _tri454590_cases() -> List[KnownCase]:
    name = "tri454590"
    cases = [
        KnownCase(name, _word("1,2,3,2"), Verdict.LAMBDA_STABLE, {
            "departure_angle": 0.0,
            "omega0": PI / 8.0,
            "total_length": 2.0,
            "base_interval": [0.0, 1.0],
            "sum_left": 0.0,
            "sum_right": PI / 2.0,
        }, note="perpendicular to the legs; word reconstructed by unfolding"),
        KnownCase(name, _word("1,2,1,3,2,3"), Verdict.LAMBDA_STABLE, {
            "departure_angle": PI / 4.0,
            "omega0": PI / 12.0,
            "total_length": 2.0 * SQRT2,
            "sum_left": 0.0,
            "sum_right": PI / SQRT2,
        }, note="perpendicular to the diagonal; word reconstructed by unfolding"),
    ]
    return _with_reverse(cases, provenance=DERIVED)


def _regular_cases(d: int, name: str) -> List[KnownCase]:
    """All Fagnano cylinders of the regular d-gon, both directions"""
    cases = []
    for m in range(1, d // 2 + 1):
        for start in range(1, math.gcd(d, m) + 1):
            word = fagnano_itinerary(d, m, start)
            if 2 * m == d:
                cases.append(KnownCase(name, word, Verdict.PING_PONG, note="ping-pong"))
            elif word.is_even:
                theta = 0.5 * PI * (1.0 - 2.0 * m / d)
                cases.append(KnownCase(name, word, Verdict.LAMBDA_STABLE, {
                    "departure_angle": theta,
                    "omega0": 0.5 * theta,
                    "theta_sequence": [theta] * word.period,
                }, note=f"Fagnano m={m}"))
            else:
                cases.append(KnownCase(name, word, Verdict.ODD_PERIOD, note=f"Fagnano m={m}"))
    return _with_reverse(cases)


def _rectangle_cases(w: float, name: str) -> List[KnownCase]:
    cases = [
        KnownCase(name, _word("1,3"), Verdict.PING_PONG, note="ping-pong"),
        KnownCase(name, _word("2,4"), Verdict.PING_PONG, note="ping-pong"),
    ]
    admitted = {(s.p, s.q) for s in rectangle_admissible_slopes(w, max_sum=12)}
    fagnano = rectangle_cylinder_itinerary(w, 1, 1)
    if (1, 1) in admitted:
        cases.append(KnownCase(name, fagnano, Verdict.LAMBDA_STABLE, note="Fagnano"))
    else:
        cases.append(KnownCase(name, fagnano, Verdict.NO_SUCH_ORBIT,
                               note="diagonal word away from the square"))
    if (1, 2) in admitted:
        # hand computation: sums pi/3 and pi at the ends, Omega_0 L = 2 pi/3
        cases.append(KnownCase(name, rectangle_cylinder_itinerary(w, 1, 2), Verdict.LAMBDA_STABLE, {
            "departure_angle": PI / 3.0,
            "omega0": PI / 6.0,
            "total_length": 4.0,
            "base_interval": [0.0, w],
            "sum_left": PI / 3.0,
            "sum_right": PI,
            "omega0_L": 2.0 * PI / 3.0,
        }, provenance=DERIVED, note="slope 1/(2w)"))
    elif (1, 1) in admitted:
        cases.append(KnownCase(name, rectangle_cylinder_itinerary(w, 1, 2), Verdict.NO_SUCH_ORBIT,
                               note="slope 1/2 has no orbit at its departure angle"))
    return _with_reverse(cases)


def parse_catalog_name(text: str) -> Tuple[str, Dict[str, Any]]:
    """"regular(5)" -> ("regular", {"d": 5}); "rectangle(2)" -> ("rectangle", {"w": 2.0})"""
    match = re.fullmatch(r"\s*([a-z0-9]+)\s*(?:\(\s*([^)]*?)\s*\))?\s*", text)
    if not match:
        raise UnknownNameError(f"cannot parse catalog name {text!r}")
    base, argument = match.group(1), match.group(2)
    if base not in POLYGON_NAMES:
        raise UnknownNameError(f"unknown catalog polygon {base!r}",
                               context={"known": list(POLYGON_NAMES)})
    params: Dict[str, Any] = {}
    try:
        if base == "regular":
            if argument is None:
                raise BadParameterError("regular(d) needs the number of sides")
            params["d"] = int(argument)
        elif base == "rectangle":
            if argument is None:
                raise BadParameterError("rectangle(w) needs the aspect ratio")
            params["w"] = float(argument)
        elif argument:
            raise BadParameterError(f"{base} takes no parameters")
    except ValueError as e:
        raise BadParameterError(f"bad parameter in {text!r}") from e
    return base, params


def known_polygon(name: str, **params: Any) -> Tuple[Polygon, List[KnownCase]]:
    """Catalog polygon by name, e.g. "equilateral" or "regular(5)", with its known cases"""
    base, parsed = parse_catalog_name(name)
    parsed.update(params)
    if base == "square":
        polygon = build_polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], name="square")
        return polygon, _rectangle_cases(1.0, "square")
    if base == "rectangle":
        polygon = rectangle(float(parsed["w"]))
        return polygon, _rectangle_cases(float(parsed["w"]), polygon.name)
    if base == "equilateral":
        return equilateral(), _equilateral_cases()
    if base == "hexagon":
        return regular_polygon(6, name="hexagon"), _regular_cases(6, "hexagon")
    if base == "tri306090":
        return tri306090(), _tri306090_cases()
    if base == "tri454590":
        return tri454590(), _tri454590_cases()
    d = int(parsed["d"])
    polygon = regular_polygon(d)
    return polygon, _regular_cases(d, polygon.name)


def catalog_names() -> List[str]:
    """Polygons covered by the default reproduction run"""
    names = ["square", "rectangle(2)", f"rectangle({SQRT3 / 2.0!r})", "equilateral", "hexagon",
             "tri306090", "tri454590"]
    names.extend(f"regular({d})" for d in range(3, 9))
    return names


def observed_witnesses(polygon: Polygon, report: StabilityReport) -> Dict[str, Any]:
    """Witness values of a report, plus the cylinder tables for even cylinders"""
    observed: Dict[str, Any] = {
        "departure_angle": report.departure_angle,
        "omega0": report.omega0,
        "total_length": report.total_length,
        "sum_left": report.sum_left,
        "sum_right": report.sum_right,
        "omega0_L": report.omega0_L,
        "base_interval": list(report.base_interval) if report.base_interval else None,
    }
    if report.verdict in (Verdict.LAMBDA_STABLE, Verdict.NOT_LAMBDA_STABLE, Verdict.INCONCLUSIVE):
        cylinder = build_cylinder(polygon, report.itinerary)
        observed["theta_sequence"] = cylinder.theta_hat[:-1].tolist()
        observed["lengths_left"] = cylinder.lengths_l.tolist()
        observed["lengths_right"] = cylinder.lengths_r.tolist()
    return observed


def _compare(key: str, expected: Any, actual: Any) -> Optional[str]:
    if actual is None:
        return f"{key}: not computed"
    tol = CLOSED_FORM_TOL if key in CLOSED_FORM_WITNESSES else LENGTH_TOL
    want = np.atleast_1d(np.asarray(expected, dtype=float))
    got = np.atleast_1d(np.asarray(actual, dtype=float))
    if want.shape != got.shape:
        return f"{key}: expected {want.size} values, got {got.size}"
    if not np.allclose(got, want, rtol=0.0, atol=tol):
        return f"{key}: expected {want.tolist()}, got {got.tolist()}"
    return None


def check_case(polygon: Polygon, case: KnownCase) -> CaseOutcome:
    try:
        report = classify(polygon, case.itinerary)
    except PinballError as e:
        _errors.handle_error("check_case", e, {"polygon": case.polygon_name, "itinerary": str(case.itinerary)},
                             reraise=False)
        return CaseOutcome(case, None, [f"classify failed: {e.message}"])
    outcome = CaseOutcome(case, report)
    if report.verdict is not case.expected:
        outcome.mismatches.append(f"verdict: expected {case.expected.value}, got {report.verdict.value}")
        return outcome
    if case.witnesses:
        observed = observed_witnesses(polygon, report)
        for key, expected in case.witnesses.items():
            problem = _compare(key, expected, observed.get(key))
            if problem:
                outcome.mismatches.append(problem)
    return outcome


def reproduce(names: Optional[Sequence[str]] = None,
              max_workers: Optional[int] = None) -> List[CaseOutcome]:
    """Classify every known case of the named polygons and check it"""
    jobs: List[Tuple[Polygon, KnownCase]] = []
    for name in names or catalog_names():
        polygon, cases = known_polygon(name)
        jobs.extend((polygon, case) for case in cases)
    with ThreadPoolExecutor(max_workers=max_workers or default_worker_count()) as executor:
        outcomes = list(executor.map(lambda job: check_case(*job), jobs))
    failed = sum(not o.passed for o in outcomes)
    logger.info("Reproduced %d cases, %d failed", len(outcomes), failed)
    return outcomes


def format_outcomes(outcomes: Sequence[CaseOutcome]) -> str:
    rows = []
    for outcome in outcomes:
        case = outcome.case
        rows.append([
            case.polygon_name,
            str(case.itinerary),
            case.expected.value,
            outcome.report.verdict.value if outcome.report else "-",
            case.provenance,
            "pass" if outcome.passed else "FAIL: " + "; ".join(outcome.mismatches),
        ])
    table = format_table(["polygon", "itinerary", "expected", "verdict", "provenance", "status"], rows)
    passed = sum(o.passed for o in outcomes)
    return f"{table}{passed}/{len(outcomes)} cases passed\n"


def _witness_json(witnesses: Mapping[str, Any]) -> str:
    def encode(value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return [encode(v) for v in value]
        return format_number(value)
    return json.dumps({key: encode(value) for key, value in sorted(witnesses.items())})


def export_cases_csv(cases: Sequence[KnownCase], path: str) -> None:
    """Case list as CSV: polygon, itinerary, expected verdict, provenance, note, witnesses"""
    ensure_directory_exists(os.path.dirname(path))
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["polygon", "itinerary", "expected", "provenance", "note", "witnesses"])
        for case in cases:
            writer.writerow([case.polygon_name, str(case.itinerary), case.expected.value,
                             case.provenance, case.note, _witness_json(case.witnesses)])
