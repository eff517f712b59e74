"""Command-line interface and run configuration."""

from .config import COMMANDS, ConfigParseError, Param, RunConfig, parse_config
from .main import execute, main, run

__all__ = ["COMMANDS", "ConfigParseError", "Param", "RunConfig", "execute", "main",
           "parse_config", "run"]
