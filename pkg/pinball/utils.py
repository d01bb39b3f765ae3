"""
Utility functions and helpers for pinball-stability
"""

import copy
import logging
import math
import os
import sys
from typing import Any, Dict, Iterable, Optional

import psutil
import yaml

from .exceptions import ConfigValidationError


def ensure_directory_exists(path: str) -> None:
    """Ensure directory exists, create if necessary"""
    if path:
        os.makedirs(path, exist_ok=True)


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_yaml_config(config_file: str, defaults: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Load YAML configuration with defaults (sections are merged key by key)"""
    config = copy.deepcopy(defaults) if defaults else {}

    if os.path.exists(config_file):
        try:
            with open(config_file, 'r') as f:
                loaded_config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logging.warning(f"Error loading config file {config_file}: {e}")
            return config
        if not isinstance(loaded_config, dict):
            raise ConfigValidationError(f"{config_file}: top level must be a mapping")
        config = _merge(config, loaded_config)

    return config


def validate_config(config: Dict[str, Any], schema: Dict[str, Dict[str, Any]]) -> bool:
    """Validate configuration against schema"""
    for key, rules in schema.items():
        if key not in config:
            continue

        value = config[key]

        # Type validation
        expected_types = rules.get("type")
        if expected_types:
            if not isinstance(expected_types, (list, tuple)):
                expected_types = [expected_types]

            if isinstance(value, bool) and bool not in expected_types:
                raise ConfigValidationError(f"{key}: expected {expected_types}, got {type(value)}")
            if not any(isinstance(value, t) for t in expected_types):
                raise ConfigValidationError(f"{key}: expected {expected_types}, got {type(value)}")

        # Range validation
        if "min" in rules and value < rules["min"]:
            raise ConfigValidationError(f"{key}: value {value} below minimum {rules['min']}")

        if "max" in rules and value > rules["max"]:
            raise ConfigValidationError(f"{key}: value {value} above maximum {rules['max']}")

        # Choice validation
        if "choices" in rules and value not in rules["choices"]:
            raise ConfigValidationError(f"{key}: value {value} not in {rules['choices']}")

    return True


def setup_logger(name: str, level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """Setup logger with consistent formatting"""
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))

    # Remove existing handlers to avoid duplicates
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    formatter = logging.Formatter(
        '%(asctime)s [%(levelname)8s] %(name)s: %(message)s'
    )

    # Reports own stdout; logs go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        ensure_directory_exists(os.path.dirname(log_file))
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def format_execution_time(seconds: float) -> str:
    """Format execution time in human-readable format"""
    if seconds < 60:
        return f"{seconds:.2f}s"
    minutes = int(seconds // 60)
    remaining_seconds = seconds % 60
    return f"{minutes}m {remaining_seconds:.2f}s"


def format_number(value: Optional[float]) -> str:
    """Twelve significant digits; '-' for missing values"""
    if value is None:
        return "-"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.12g}"


def format_table(header: Iterable[str], rows: Iterable[Iterable[str]]) -> str:
    """Left-aligned plain text table"""
    header = list(header)
    body = [list(row) for row in rows]
    widths = [len(h) for h in header]
    for row in body:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip()]
    for row in body:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def default_worker_count() -> int:
    """Physical core count, at least one"""
    return psutil.cpu_count(logical=False) or 1


def write_output(text: str, path: Optional[str] = None) -> None:
    """Write text to a file, or stdout when no path is given"""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    ensure_directory_exists(os.path.dirname(path))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
