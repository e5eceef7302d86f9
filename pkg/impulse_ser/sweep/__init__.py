"""Scenario loading, predictor dispatch and sweep execution."""

from .config_loader import bundled_scenarios, load_config, parse_config
from .method_registry import MethodRegistry, PredictionContext, method_registry
from .runner import (
    PointResult,
    build_channel,
    build_noise,
    build_params,
    build_suppressor,
    run_point,
    run_sweep,
)

__all__ = [
    # Configuration
    "bundled_scenarios",
    "load_config",
    "parse_config",
    # Predictors
    "MethodRegistry",
    "PredictionContext",
    "method_registry",
    # Execution
    "PointResult",
    "build_channel",
    "build_noise",
    "build_params",
    "build_suppressor",
    "run_point",
    "run_sweep",
]
