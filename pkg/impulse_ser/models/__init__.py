"""Data contracts shared across layers."""

from .schemas import (
    BussgangDecomposition,
    ChannelSpec,
    DiscretePdf,
    FitResult,
    GmmSpec,
    MixtureOfDistortionComponents,
    NoiseBatch,
    NoiseSample,
    OfdmParams,
    SerCurve,
    SerEstimate,
    SerQuery,
    SuppressorSpec,
    VarianceFunction,
)
from .sweep import (
    AxisConfig,
    ChannelConfig,
    CurvesConfig,
    MethodsConfig,
    NoiseConfig,
    OfdmConfig,
    ScenarioConfig,
    SimulationConfig,
    SuppressorConfig,
    SweepConfig,
)

__all__ = [
    # Domain types
    "BussgangDecomposition",
    "ChannelSpec",
    "DiscretePdf",
    "FitResult",
    "GmmSpec",
    "MixtureOfDistortionComponents",
    "NoiseBatch",
    "NoiseSample",
    "OfdmParams",
    "SerCurve",
    "SerEstimate",
    "SerQuery",
    "SuppressorSpec",
    "VarianceFunction",
    # Sweep configuration
    "AxisConfig",
    "ChannelConfig",
    "CurvesConfig",
    "MethodsConfig",
    "NoiseConfig",
    "OfdmConfig",
    "ScenarioConfig",
    "SimulationConfig",
    "SuppressorConfig",
    "SweepConfig",
]
