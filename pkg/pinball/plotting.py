"""
SVG figures of a cylinder orbit and its pinball counterpart.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .cylinder import base_interval, build_cylinder  # noqa: E402
from .dynamics import PhasePoint, trace_word  # noqa: E402
from .exceptions import InvalidBracketError, PinballError, SlopeOneError  # noqa: E402
from .geometry import Polygon  # noqa: E402
from .itinerary import Itinerary, as_itinerary  # noqa: E402
from .stability import continue_orbit, locate_odd_orbit, stable_base_point  # noqa: E402
from .utils import write_output  # noqa: E402

logger = logging.getLogger(__name__)

VIEW_MARGIN = 0.05


@dataclass(frozen=True)
class OrbitPicture:
    """Closed polylines (period + 1 vertices each) over the polygon outline"""
    polygon: Polygon
    itinerary: Itinerary
    lam: float
    cylinder_orbit: Optional[np.ndarray]
    pinball_orbit: Optional[np.ndarray]


def _polyline(polygon: Polygon, itinerary: Itinerary, start: PhasePoint, lam: float) -> np.ndarray:
    segment, _ = trace_word(polygon, itinerary, start, lam)
    points = [polygon.xy(p.position) for p in segment.points]
    points.append(points[0])
    return np.array(points)


def _cylinder_start(polygon: Polygon, itinerary: Itinerary) -> PhasePoint:
    if not itinerary.is_even:
        return locate_odd_orbit(polygon, itinerary, 1.0)
    if itinerary.period == 2:
        return PhasePoint.at(itinerary[0], base_interval(polygon, itinerary).midpoint, 0.0)
    cylinder = build_cylinder(polygon, itinerary)
    try:
        s0 = stable_base_point(polygon, itinerary)
    except (InvalidBracketError, SlopeOneError):
        s0 = cylinder.midpoint
    return PhasePoint.at(itinerary[0], s0, cylinder.departure)


def _pinball_start(polygon: Polygon, itinerary: Itinerary, lam: float,
                   cylinder_start: PhasePoint) -> Optional[PhasePoint]:
    if not itinerary.is_even:
        return locate_odd_orbit(polygon, itinerary, lam)
    if itinerary.period == 2:
        # theta = 0 is invariant under the angle scaling
        return cylinder_start
    row = continue_orbit(polygon, itinerary, [lam])[0]
    if not row.legal:
        return None
    return PhasePoint.at(itinerary[0], row.s0, row.theta0)


def orbit_polylines(polygon: Polygon, itinerary: Itinerary, lam: float) -> OrbitPicture:
    """The lambda = 1 orbit of the cylinder and the pinball periodic orbit at lam"""
    itinerary = as_itinerary(itinerary)
    itinerary.check_sides(polygon.d)
    start = _cylinder_start(polygon, itinerary)
    cylinder_orbit = _polyline(polygon, itinerary, start, 1.0)
    pinball_orbit = None
    try:
        pinball_start = _pinball_start(polygon, itinerary, lam, start)
        if pinball_start is not None:
            pinball_orbit = _polyline(polygon, itinerary, pinball_start, lam)
    except PinballError as e:
        logger.warning("No pinball orbit for %s at lambda=%g: %s", itinerary, lam, e)
    if pinball_orbit is None:
        logger.warning("Drawing %s without a pinball orbit at lambda=%g", itinerary, lam)
    return OrbitPicture(polygon, itinerary, lam, cylinder_orbit, pinball_orbit)


def render_svg(picture: OrbitPicture, path: Optional[str] = None) -> str:
    """Polygon outline, dashed cylinder orbit, solid pinball orbit; returns the SVG text"""
    outline = np.vstack([picture.polygon.vertices, picture.polygon.vertices[:1]])
    lo = outline.min(axis=0)
    hi = outline.max(axis=0)
    pad = VIEW_MARGIN * (hi - lo).max()

    with plt.rc_context({"svg.hashsalt": "pinball", "path.simplify": False,
                         "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(5, 5))
        try:
            ax.plot(outline[:, 0], outline[:, 1], color="black", linewidth=1.5, gid="polygon")
            if picture.cylinder_orbit is not None:
                ax.plot(picture.cylinder_orbit[:, 0], picture.cylinder_orbit[:, 1],
                        color="tab:blue", linestyle="--", linewidth=1.0, gid="cylinder-orbit")
            if picture.pinball_orbit is not None:
                ax.plot(picture.pinball_orbit[:, 0], picture.pinball_orbit[:, 1],
                        color="tab:red", linestyle="-", linewidth=1.0, gid="pinball-orbit")
            ax.set_xlim(lo[0] - pad, hi[0] + pad)
            ax.set_ylim(lo[1] - pad, hi[1] + pad)
            ax.set_aspect("equal")
            ax.set_axis_off()
            ax.set_title(f"{picture.polygon.name}  {{{picture.itinerary}}}  lambda={picture.lam:.12g}",
                         fontsize=9)
            buffer = io.StringIO()
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)

    svg = buffer.getvalue()
    if path is not None:
        write_output(svg, path)
    return svg
