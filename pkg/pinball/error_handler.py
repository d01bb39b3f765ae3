#!/usr/bin/env python3
"""
Error logging for pinball-stability

Failures are logged once, at a level that depends on the error family,
with the error context attached to the record through ``extra``.
"""

import logging
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, Tuple, Type

from .exceptions import (
    CatalogError,
    ConfigurationError,
    DynamicsError,
    ErrorContext,
    GeometryError,
    PinballError,
    create_error_context,
)
from .utils import format_execution_time

# first match wins; degenerate orbits are routine in sampling and continuation
LEVELS: Tuple[Tuple[Type[BaseException], int, str], ...] = (
    (ConfigurationError, logging.CRITICAL, "Configuration error"),
    (GeometryError, logging.WARNING, "Degenerate orbit"),
    (DynamicsError, logging.WARNING, "Degenerate orbit"),
    (CatalogError, logging.ERROR, "Catalog error"),
    (PinballError, logging.ERROR, "Error"),
)


class ErrorHandler:
    """Logs failures of one component under ``pinball.<component>``"""

    def __init__(self, component_name: str):
        self.component_name = component_name
        self.logger = logging.getLogger(f"pinball.{component_name}")

    def handle_error(
        self,
        operation: str,
        error: Exception,
        context: Optional[Dict[str, Any]] = None,
        reraise: bool = True
    ) -> ErrorContext:
        error_context = create_error_context(
            component=self.component_name,
            operation=operation,
            error=error,
            additional_context=context,
        )
        level, label = next(
            ((lvl, lbl) for kind, lvl, lbl in LEVELS if isinstance(error, kind)),
            (logging.ERROR, "Unexpected error"),
        )
        self.logger.log(level, f"{label} in {operation}: {error}", extra=error_context.to_dict())

        if reraise:
            raise error
        return error_context

    @contextmanager
    def timed(self, operation: str, **context: Any) -> Iterator[None]:
        """Log start at DEBUG and completion with elapsed time at INFO"""
        self.logger.debug(f"Starting {operation}", extra={"operation": operation, "details": context})
        started = time.perf_counter()
        yield
        elapsed = format_execution_time(time.perf_counter() - started)
        self.logger.info(f"Completed {operation} in {elapsed}",
                         extra={"operation": operation, "details": context})
