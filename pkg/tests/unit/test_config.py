"""
Unit tests for configuration loading and error handling
"""

import logging
import os
import re

import pytest
import yaml

from pinball.config import DEFAULT_CONFIG, load_config
from pinball.error_handler import ErrorHandler
from pinball.exceptions import (
    ConfigurationError,
    EmptyIntervalError,
    PinballError,
    VertexHitError,
    create_error_context,
)


class TestLoadConfig:
    """Test load_config"""

    def test_defaults(self):
        """Test the built-in configuration"""
        config = load_config()
        assert config == DEFAULT_CONFIG
        assert config is not DEFAULT_CONFIG

    def test_shipped_file(self):
        """Test the configuration file in the repository validates"""
        path = os.path.join(os.path.dirname(__file__), "..", "..", "config", "config.yaml")
        config = load_config(path)
        assert config["continuation"]["lambda_grid"] == "0.9:1.1:41"
        assert config["search"]["seed"] == 0

    def test_override(self, temp_dir, sample_config):
        """Test partial sections merge over the defaults"""
        path = os.path.join(temp_dir, "config.yaml")
        with open(path, "w") as f:
            yaml.dump(sample_config, f)
        config = load_config(path)
        assert config["log_level"] == "DEBUG"
        assert config["max_workers"] == 2
        assert config["search"]["samples"] == 8
        assert config["search"]["transient"] == DEFAULT_CONFIG["search"]["transient"]

    def test_missing_file(self, temp_dir):
        """Test an explicit path that does not exist"""
        with pytest.raises(ConfigurationError):
            load_config(os.path.join(temp_dir, "absent.yaml"))

    @pytest.mark.parametrize("override", [
        {"log_level": "LOUD"},
        {"max_workers": 0},
        {"search": {"lambda": 1.5}},
        {"search": {"samples": 0}},
        {"stability": {"strict_margin": -1.0}},
        {"continuation": {"lambda_grid": 3}},
    ])
    def test_invalid_values(self, temp_dir, override):
        """Test values outside the schema"""
        path = os.path.join(temp_dir, "config.yaml")
        with open(path, "w") as f:
            yaml.dump(override, f)
        with pytest.raises(ConfigurationError):
            load_config(path)


class TestErrors:
    """Test the exception hierarchy and its context"""

    def test_error_code_defaults_to_class_name(self):
        """Test error codes and context"""
        error = EmptyIntervalError("no orbit", context={"word": (1, 2)})
        assert error.error_code == "EmptyIntervalError"
        assert error.context == {"word": (1, 2)}
        assert isinstance(error, PinballError)

    def test_error_context(self):
        """Test the structured context record"""
        error = VertexHitError("corner", context={"side": 2})
        record = create_error_context("dynamics", "step", error, {"lam": 0.9}).to_dict()
        assert record["error_code"] == "VertexHitError"
        assert record["details"]["side"] == 2
        assert record["details"]["lam"] == 0.9


class TestErrorHandler:
    """Test ErrorHandler"""

    def test_reraise(self):
        """Test errors are re-raised by default"""
        handler = ErrorHandler("test")
        with pytest.raises(EmptyIntervalError):
            handler.handle_error("classify", EmptyIntervalError("empty"))

    def test_logged_without_reraise(self, caplog):
        """Test the log level follows the error kind"""
        handler = ErrorHandler("test")
        with caplog.at_level(logging.DEBUG, logger="pinball.test"):
            context = handler.handle_error("step", VertexHitError("corner"), reraise=False)
            handler.handle_error("load", ConfigurationError("bad"), reraise=False)
        assert context.operation == "step"
        levels = [record.levelno for record in caplog.records]
        assert levels == [logging.WARNING, logging.CRITICAL]

    def test_timed(self, caplog):
        """Test completion is logged at INFO and errors pass through"""
        handler = ErrorHandler("test")
        with caplog.at_level(logging.DEBUG, logger="pinball.test"):
            with handler.timed("sweep", rows=41):
                pass
        messages = [record.getMessage() for record in caplog.records]
        assert messages[0] == "Starting sweep"
        assert re.fullmatch(r"Completed sweep in \d+\.\d\ds", messages[1])
        assert caplog.records[1].levelno == logging.INFO

        with pytest.raises(EmptyIntervalError):
            with handler.timed("classify"):
                raise EmptyIntervalError("empty")
