"""Configuration and error types shared by every layer."""

from .config import Config
from .errors import (
    ConfigError,
    FitError,
    FitInputError,
    ImpulseSerError,
    SuppressorError,
    UnsupportedModulationError,
)

__all__ = [
    "Config",
    "ConfigError",
    "FitError",
    "FitInputError",
    "ImpulseSerError",
    "SuppressorError",
    "UnsupportedModulationError",
]
