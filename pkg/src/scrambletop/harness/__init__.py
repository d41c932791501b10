"""Configuration, scenario runners, and file emitters for the CLI."""

from .config import ConfigError, ScenarioConfig, parse_config, parse_number
from .scenarios import RunManifest, run

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "parse_config",
    "parse_number",
    "RunManifest",
    "run",
]
