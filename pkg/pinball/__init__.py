"""
pinball-stability - periodic orbits of polygonal billiards under contracting reflection laws

The pinball map reflects like a billiard and then pulls the outgoing angle
toward the normal by a factor lambda. A periodic cylinder of the billiard is
lambda-stable when pinball periodic orbits with its itinerary converge to it
as lambda -> 1. This package decides that property, follows the periodic
points in lambda and reproduces the known cases for integrable polygons.
"""

from .catalog import KnownCase, known_polygon, regular_polygon, reproduce
from .cylinder import Cylinder, base_interval, build_cylinder, departure_angle, path_lengths
from .dynamics import PhasePoint, billiard_step, find_attracting_cycles, pinball_step
from .exceptions import PinballError
from .geometry import BoundaryPoint, Polygon, build_polygon, cast_ray, load_polygon_file, unfold
from .itinerary import Itinerary
from .stability import StabilityReport, Verdict, classify, continue_orbit, sufficient_check

__version__ = "0.1.0"
__author__ = "Pinball Stability Team"

__all__ = [
    "BoundaryPoint",
    "Cylinder",
    "Itinerary",
    "KnownCase",
    "PhasePoint",
    "PinballError",
    "Polygon",
    "StabilityReport",
    "Verdict",
    "base_interval",
    "billiard_step",
    "build_cylinder",
    "build_polygon",
    "cast_ray",
    "classify",
    "continue_orbit",
    "departure_angle",
    "find_attracting_cycles",
    "known_polygon",
    "load_polygon_file",
    "path_lengths",
    "pinball_step",
    "regular_polygon",
    "reproduce",
    "sufficient_check",
    "unfold",
]
