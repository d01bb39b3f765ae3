#!/usr/bin/env python3
"""
Custom exceptions for pinball-stability
"""

import time
from dataclasses import dataclass, asdict
from typing import Dict, Any, Optional


class PinballError(Exception):
    """Base exception for pinball-stability"""

    def __init__(self, message: str, error_code: Optional[str] = None,
                 context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.context = context or {}
        self.timestamp = time.time()


class GeometryError(PinballError):
    """Polygon and ray-casting errors"""
    pass


class NonSimplePolygonError(GeometryError):
    """Polygon boundary intersects itself or has zero area"""
    pass


class ClockwiseOrientationError(GeometryError):
    """Vertices are listed clockwise"""
    pass


class DegenerateSideError(GeometryError):
    """A side has zero length"""
    pass


class VertexStartError(GeometryError):
    """Ray starts at a corner"""
    pass


class GrazingRayError(GeometryError):
    """Angle too close to the tangent direction"""
    pass


class ParallelLinesError(GeometryError):
    """Supporting-line projection undefined"""
    pass


class VertexCrossingError(GeometryError):
    """Straightened line passes through a corner of an image polygon"""
    pass


class VertexHitError(GeometryError):
    """Orbit lands on a corner; the billiard map is undefined there"""
    pass


class PolygonFileError(GeometryError):
    """Polygon file missing or malformed"""
    pass


class DynamicsError(PinballError):
    """Pinball map errors"""
    pass


class AngleOverflowError(DynamicsError):
    """Scaled angle left (-pi/2, pi/2)"""
    pass


class ItineraryError(PinballError):
    """Symbolic itinerary errors"""
    pass


class IllegalItineraryError(ItineraryError):
    """Word is not a legal itinerary on the polygon"""
    pass


class OddPeriodError(ItineraryError):
    """Even-period machinery called with an odd word"""
    pass


class PingPongWordError(ItineraryError):
    """Period-2 word handed to the return-map machinery"""
    pass


class CylinderError(PinballError):
    """Periodic cylinder errors"""
    pass


class EmptyIntervalError(CylinderError):
    """Itinerary not realizable at the departure angle"""
    pass


class NecessaryConditionFailedError(CylinderError):
    """Alternating beta sum does not vanish"""
    pass


class OutsideBaseError(CylinderError):
    """Base coordinate outside the closed base interval"""
    pass


class StabilityError(PinballError):
    """Stability test errors"""
    pass


class InvalidBracketError(StabilityError):
    """Bracket is empty or leaves the base interval"""
    pass


class SlopeOneError(StabilityError):
    """Return map has slope one; no isolated fixed point"""
    pass


class CatalogError(PinballError):
    """Catalog lookup errors"""
    pass


class UnknownNameError(CatalogError):
    """No catalog polygon of that name"""
    pass


class BadParameterError(CatalogError):
    """Catalog parameter out of range"""
    pass


class ConfigurationError(PinballError):
    """Configuration-related errors"""
    pass


class ConfigValidationError(ConfigurationError):
    """Configuration value rejected by a schema rule"""
    pass


@dataclass
class ErrorContext:
    """Structured error context for logging and debugging"""
    component: str
    operation: str
    error_code: str
    details: Dict[str, Any]
    timestamp: float

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for logging"""
        return asdict(self)


def create_error_context(
    component: str,
    operation: str,
    error: Exception,
    additional_context: Optional[Dict[str, Any]] = None
) -> ErrorContext:
    """Create standardized error context"""
    context = additional_context or {}
    error_code = getattr(error, "error_code", type(error).__name__)

    return ErrorContext(
        component=component,
        operation=operation,
        error_code=error_code,
        details={
            'error_message': str(error),
            'error_type': type(error).__name__,
            **getattr(error, "context", {}),
            **context
        },
        timestamp=time.time()
    )
