"""
Sweep configuration models.

A scenario file maps onto SweepConfig, one sub-model per TOML table. The
models only describe a sweep; building noise mixtures, suppressors and
channels from them is the sweep runner's job.
"""

import hashlib
import json
import math
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import Config
from .schemas import ChannelKind, SuppressorKind

NoiseModel = Literal["gaussian", "bernoulli_gaussian", "class_a", "sas", "mixture"]
AxisName = Literal["sir_db", "snr_db"]


class ScenarioConfig(BaseModel):
    """Scenario identity."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="Scenario name, written to every output header")
    description: str = Field("", description="Free-text description")


class NoiseConfig(BaseModel):
    """Impulsive-noise model and its parameters."""

    model_config = ConfigDict(extra="forbid")

    model: NoiseModel = Field("bernoulli_gaussian", description="Noise family")
    snr_db: float = Field(25.0, description="Signal to white-noise ratio in dB")
    sir_db: float = Field(-20.0, description="Signal to impulsive-noise ratio in dB")
    p1: float = Field(
        0.01, ge=0.0, lt=1.0, description="Impulse probability (Bernoulli-Gaussian and SaS)"
    )
    A: float = Field(0.1, gt=0.0, description="Class-A impulsiveness index")
    components: int | None = Field(
        None, ge=1, description="Class-A truncation or SaS impulsive mixture size"
    )
    alpha: float = Field(1.2, gt=0.0, le=2.0, description="SaS characteristic exponent")
    mixture_file: str | None = Field(
        None, description="YAML weights/variances block giving the impulsive mixture shape"
    )

    @model_validator(mode="after")
    def check_mixture_file(self) -> "NoiseConfig":
        if self.model == "mixture" and not self.mixture_file:
            raise ValueError("model 'mixture' needs mixture_file")
        return self


class SuppressorConfig(BaseModel):
    """Suppressor at the receiver front end."""

    model_config = ConfigDict(extra="forbid")

    kind: SuppressorKind = Field("none", description="Suppressor family")
    thresholds: list[float] = Field(default_factory=list, description="Ascending thresholds")
    threshold_units: Literal["absolute", "sigma_y"] = Field(
        "sigma_y", description="Thresholds in absolute envelope units or in sigma_y"
    )
    gains: list[float] = Field(
        default_factory=list, description="Bin gains; empty means the posterior MMSE rule"
    )
    optimize: bool = Field(False, description="Grid-search the single threshold")
    count: int = Field(
        Config.BAS_THRESHOLD_COUNT, ge=1, description="Threshold count of a designed BAS"
    )
    span: float = Field(
        Config.BAS_THRESHOLD_SPAN, gt=0.0, description="Top BAS threshold in sigma_y"
    )

    @model_validator(mode="after")
    def check_optimize(self) -> "SuppressorConfig":
        if self.optimize and self.kind not in Config.OPTIMIZABLE_KINDS:
            raise ValueError(
                f"optimize is only available for {list(Config.OPTIMIZABLE_KINDS)}, "
                f"not '{self.kind}'"
            )
        return self


class ChannelConfig(BaseModel):
    """Channel model."""

    model_config = ConfigDict(extra="forbid")

    kind: ChannelKind = Field("flat", description="flat, rayleigh_block or rician_block")
    taps: int = Field(Config.CHANNEL_TAPS, ge=1, description="Tap count L_h of fading kinds")
    decay: float = Field(
        Config.CHANNEL_DECAY, ge=0.0, description="Exponential power-delay decay per tap"
    )
    rician_k: float = Field(
        0.0, ge=0.0, description="Rician factor K_r; inf means a non-fading channel"
    )


class OfdmConfig(BaseModel):
    """OFDM link parameters."""

    model_config = ConfigDict(extra="forbid")

    subcarriers: int = Field(Config.OFDM_SUBCARRIERS, ge=1, description="Subcarrier count L")
    qam_order: int = Field(4, description="Square QAM order M")
    signal_power: float = Field(1.0, gt=0.0, description="Time-domain signal power")
    cp_len: int | None = Field(
        None, ge=0, description="Cyclic prefix length; defaults to the channel tap count"
    )

    @field_validator("qam_order")
    @classmethod
    def check_square(cls, value: int) -> int:
        if value not in Config.SUPPORTED_QAM_ORDERS:
            raise ValueError(
                f"qam_order must be one of {list(Config.SUPPORTED_QAM_ORDERS)}, got {value}"
            )
        return value


class AxisConfig(BaseModel):
    """Swept noise ratio."""

    model_config = ConfigDict(extra="forbid")

    name: AxisName = Field("sir_db", description="sir_db or snr_db")
    start: float = Field(..., description="First axis value in dB")
    stop: float = Field(..., description="Last axis value in dB (inclusive)")
    step: float = Field(..., gt=0.0, description="Axis step in dB")

    @model_validator(mode="after")
    def check_range(self) -> "AxisConfig":
        if self.stop < self.start:
            raise ValueError(f"axis range is empty: stop {self.stop} < start {self.start}")
        return self

    def values(self) -> tuple[float, ...]:
        count = math.floor((self.stop - self.start) / self.step + 1e-9) + 1
        return tuple(round(self.start + i * self.step, 12) for i in range(count))


class CurvesConfig(BaseModel):
    """One curve per value of a dotted scenario parameter."""

    model_config = ConfigDict(extra="forbid")

    parameter: str = Field(..., description="Dotted parameter, e.g. noise.p1")
    values: list[float | str] = Field(..., min_length=1, description="Values, one curve each")

    @field_validator("parameter")
    @classmethod
    def check_parameter(cls, value: str) -> str:
        section, _, field = value.partition(".")
        known = {
            "noise": NoiseConfig,
            "suppressor": SuppressorConfig,
            "channel": ChannelConfig,
            "ofdm": OfdmConfig,
        }
        if section not in known or field not in known[section].model_fields:
            raise ValueError(f"unknown curve parameter '{value}'")
        return value

    def label(self, value: float | str) -> str:
        name = self.parameter.partition(".")[2]
        return f"{name}={value}" if isinstance(value, str) else f"{name}={value:g}"


class MethodsConfig(BaseModel):
    """Predictors to evaluate and whether to simulate."""

    model_config = ConfigDict(extra="forbid")

    analytic: list[str] = Field(default_factory=lambda: ["kgmm"], description="Method names")
    simulate: bool = Field(False, description="Run the Monte Carlo link simulator")


class SimulationConfig(BaseModel):
    """Monte Carlo budget and seed."""

    model_config = ConfigDict(extra="forbid")

    budget: int = Field(1_000_000, ge=1, description="Symbols per axis point")
    seed: int = Field(0, ge=0, description="Master seed")
    threads: int = Field(Config.SIM_THREADS, ge=1, description="Worker threads")


class SweepConfig(BaseModel):
    """
    Complete sweep description.

    Examples:
        >>> cfg = SweepConfig(
        ...     scenario={"name": "bg"},
        ...     axis={"start": -40, "stop": 0, "step": 10},
        ... )
        >>> cfg.axis.values()
        (-40.0, -30.0, -20.0, -10.0, 0.0)
    """

    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioConfig
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    suppressor: SuppressorConfig = Field(default_factory=SuppressorConfig)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    ofdm: OfdmConfig = Field(default_factory=OfdmConfig)
    axis: AxisConfig
    curves: CurvesConfig | None = None
    methods: MethodsConfig = Field(default_factory=MethodsConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)

    @model_validator(mode="after")
    def check_methods(self) -> "SweepConfig":
        if not self.methods.analytic and not self.methods.simulate:
            raise ValueError("at least one method is required (analytic list or simulate)")
        return self

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.model_dump(), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()

    def with_value(self, parameter: str, value: Any) -> "SweepConfig":
        """Copy with one dotted parameter replaced and re-validated."""
        section_name, _, field = parameter.partition(".")
        section = getattr(self, section_name)
        updated = type(section).model_validate({**section.model_dump(), field: value})
        return self.model_copy(update={section_name: updated})

    def curve_configs(self) -> list[tuple[str, "SweepConfig"]]:
        """(label, config) per curve; a single unlabeled curve without [curves]."""
        if self.curves is None:
            return [(self.scenario.name, self)]
        return [
            (self.curves.label(v), self.with_value(self.curves.parameter, v))
            for v in self.curves.values
        ]

    def at_axis(self, value: float) -> "SweepConfig":
        return self.with_value(f"noise.{self.axis.name}", value)
