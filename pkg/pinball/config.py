"""
Configuration defaults, schema and numeric tolerances
"""

import logging
import os
from typing import Any, Dict, Optional

from .exceptions import ConfigValidationError, ConfigurationError
from .utils import load_yaml_config, validate_config

logger = logging.getLogger(__name__)

# Hits closer than VERTEX_TOL * perimeter to a corner are vertex hits.
VERTEX_TOL = 1e-9
# Angles within THETA_TOL of +-pi/2 are grazing.
THETA_TOL = 1e-6
# Strict inequalities of the sufficient condition need this much room.
STRICT_MARGIN = 1e-10
# Relative slack when testing membership in a closed base interval.
CLOSURE_TOL = 1e-9
# lambda this close to 1 is treated as the billiard itself.
UNIT_LAMBDA_TOL = 1e-12

DEFAULT_CONFIG: Dict[str, Any] = {
    "log_level": "WARNING",
    "log_file": None,
    "max_workers": None,
    "stability": {
        "strict_margin": STRICT_MARGIN,
    },
    "continuation": {
        "lambda_grid": "0.9:1.1:41",
    },
    "search": {
        "lambda": 0.9,
        "samples": 1000,
        "transient": 10000,
        "record_steps": 2000,
        "capture_tolerance": 5e-2,
        "max_period": 8,
        "seed": 0,
    },
}

CONFIG_SCHEMA: Dict[str, Dict[str, Any]] = {
    "log_level": {"type": str, "choices": ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]},
    "log_file": {"type": (str, type(None))},
    "max_workers": {"type": (int, type(None))},
    "stability": {"type": dict},
    "continuation": {"type": dict},
    "search": {"type": dict},
}

SECTION_SCHEMAS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "stability": {
        "strict_margin": {"type": float, "min": 0.0, "max": 1e-3},
    },
    "continuation": {
        "lambda_grid": {"type": str},
    },
    "search": {
        "lambda": {"type": (int, float), "min": 1e-6, "max": 1.0},
        "samples": {"type": int, "min": 1},
        "transient": {"type": int, "min": 0},
        "record_steps": {"type": int, "min": 2},
        "capture_tolerance": {"type": float, "min": 0.0, "max": 1.0},
        "max_period": {"type": int, "min": 2, "max": 64},
        "seed": {"type": int, "min": 0},
    },
}


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration file, merged over the defaults and validated"""
    if not config_path:
        logger.debug("No config path provided, using default configuration")
        config = load_yaml_config("", DEFAULT_CONFIG)
    else:
        if not os.path.exists(config_path):
            raise ConfigurationError(f"Configuration file not found: {config_path}",
                                     context={"config_path": config_path})
        try:
            config = load_yaml_config(config_path, DEFAULT_CONFIG)
        except ConfigValidationError as e:
            raise ConfigurationError(str(e), context={"config_path": config_path}) from e

    _validate_config(config)
    return config


def _validate_config(config: Dict[str, Any]) -> None:
    """Validate configuration values"""
    try:
        validate_config(config, CONFIG_SCHEMA)
        for section, schema in SECTION_SCHEMAS.items():
            validate_config(config[section], schema)
        if config["max_workers"] is not None and config["max_workers"] < 1:
            raise ConfigValidationError("max_workers must be positive")
    except ConfigValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
