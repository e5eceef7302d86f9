"""
Sweep execution.

Turns a SweepConfig into domain objects (noise mixture, suppressor,
channel, link parameters), evaluates the requested predictors and the
optional link simulation at every axis point of every curve, and collects
the results into SerCurve objects sorted by axis value.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core.errors import ConfigError, SuppressorError
from ..mitigation.suppressors import (
    make_attenuation,
    make_bas,
    make_blanking,
    make_clip_blank,
    make_clipping,
    make_genie_aided,
    optimize_threshold,
    posterior_gains,
)
from ..models.schemas import (
    ChannelSpec,
    GmmSpec,
    OfdmParams,
    SerCurve,
    SerEstimate,
    SuppressorSpec,
)
from ..models.sweep import ChannelConfig, NoiseConfig, SuppressorConfig, SweepConfig
from ..noise.gmm_noise import make_bernoulli_gaussian, make_class_a, make_sas_noise
from ..simulation.ofdm_sim import blocks_for_budget, run_campaign
from .method_registry import PredictionContext, method_registry

logger = logging.getLogger(__name__)

# SaS impulsive mixture size when [noise] does not set components
SAS_COMPONENTS = 4


# =============================================================================
# Builders
# =============================================================================


def _db(signal_power: float, ratio_db: float) -> float:
    return signal_power / 10.0 ** (ratio_db / 10.0)


def _rescaled_mixture(shape: GmmSpec, cfg: NoiseConfig, signal_power: float) -> GmmSpec:
    """Put the white component at snr_db and scale the impulsive ones to sir_db."""
    white = _db(signal_power, cfg.snr_db)
    if shape.K == 1:
        return GmmSpec(weights=(1.0,), variances=(white,))
    factor = _db(signal_power, cfg.sir_db) / shape.impulsive_variance
    return GmmSpec(
        weights=shape.weights,
        variances=(white, *(v * factor for v in shape.variances[1:])),
    )


def build_noise(cfg: NoiseConfig, signal_power: float) -> GmmSpec:
    """
    Noise mixture of a [noise] table.

    Raises:
        ConfigError: If the parameters do not describe a valid mixture.
    """
    try:
        if cfg.model == "gaussian" or (
            cfg.model in ("bernoulli_gaussian", "sas") and cfg.p1 == 0.0
        ):
            return GmmSpec(weights=(1.0,), variances=(_db(signal_power, cfg.snr_db),))
        if cfg.model == "bernoulli_gaussian":
            return make_bernoulli_gaussian(cfg.p1, cfg.snr_db, cfg.sir_db, signal_power)
        if cfg.model == "class_a":
            return make_class_a(cfg.A, cfg.snr_db, cfg.sir_db, signal_power, K=cfg.components)
        if cfg.model == "sas":
            return make_sas_noise(
                cfg.alpha,
                cfg.p1,
                cfg.snr_db,
                cfg.sir_db,
                signal_power,
                K=cfg.components or SAS_COMPONENTS,
            )
        path = Path(cfg.mixture_file or "")
        shape = GmmSpec.from_config_block(path.read_text())
        return _rescaled_mixture(shape, cfg, signal_power)
    except OSError as e:
        raise ConfigError(f"cannot read mixture file: {e}", field="noise.mixture_file") from e
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), field=f"noise.{cfg.model}") from e


def build_suppressor(cfg: SuppressorConfig, noise: GmmSpec, signal_power: float) -> SuppressorSpec:
    """
    Suppressor of a [suppressor] table, designed for signal_power.

    Raises:
        ConfigError: If thresholds or gains do not fit the kind.
    """
    unit = math.sqrt(signal_power + noise.total_power) if cfg.threshold_units == "sigma_y" else 1.0
    thresholds = tuple(t * unit for t in cfg.thresholds)
    gains = tuple(cfg.gains) or None

    try:
        if cfg.optimize:
            return optimize_threshold(cfg.kind, signal_power, noise)
        if cfg.kind == "none":
            return SuppressorSpec(kind="none")
        if cfg.kind == "genie_aided":
            return make_genie_aided(signal_power, noise)
        if cfg.kind == "multi_threshold_bas":
            if not thresholds:
                return make_bas(signal_power, noise, count=cfg.count, span=cfg.span)
            return SuppressorSpec(
                kind="multi_threshold_bas",
                thresholds=thresholds,
                gains=gains or posterior_gains(thresholds, signal_power, noise),
            )
        if not thresholds:
            raise ConfigError(f"{cfg.kind} needs thresholds or optimize = true", field="suppressor")
        if cfg.kind == "blanking":
            return make_blanking(thresholds[0])
        if cfg.kind == "clipping":
            return make_clipping(thresholds[0])
        if cfg.kind == "clip_blank":
            return make_clip_blank(*thresholds)
        if gains is not None and len(gains) != 2:
            raise ConfigError(
                f"{cfg.kind} takes 2 gains, got {len(gains)}", field="suppressor.gains"
            )
        pair = (gains[0], gains[1]) if gains else None
        return make_attenuation(thresholds[0], signal_power, noise, gains=pair)
    except (SuppressorError, TypeError) as e:
        raise ConfigError(str(e), field="suppressor") from e
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e), field="suppressor") from e


def build_channel(cfg: ChannelConfig) -> ChannelSpec:
    """Channel of a [channel] table; an infinite Rician factor means no fading."""
    if cfg.kind == "flat" or (cfg.kind == "rician_block" and math.isinf(cfg.rician_k)):
        return ChannelSpec.flat()
    return ChannelSpec.exponential(cfg.kind, cfg.taps, cfg.decay, rician_k=cfg.rician_k)


def build_params(cfg: SweepConfig) -> OfdmParams:
    channel = build_channel(cfg.channel)
    cp_len = cfg.ofdm.cp_len
    if cp_len is None:
        cp_len = 0 if channel.kind == "flat" else channel.taps
    try:
        return OfdmParams(
            L=cfg.ofdm.subcarriers,
            M=cfg.ofdm.qam_order,
            cp_len=cp_len,
            signal_power=cfg.ofdm.signal_power,
        )
    except ValueError as e:
        raise ConfigError(str(e), field="ofdm") from e


# =============================================================================
# Execution
# =============================================================================


@dataclass(frozen=True)
class PointResult:
    """Predictions and the optional simulation estimate at one axis point."""

    axis_value: float
    predictions: dict[str, float]
    estimate: SerEstimate | None = None


def point_seed(seed: int, curve: int, point: int) -> int:
    """Independent simulation seed per (curve, axis point)."""
    return int(np.random.SeedSequence([seed, curve, point]).generate_state(1)[0])


def run_point(
    cfg: SweepConfig,
    axis_value: float,
    methods: list[str],
    simulate: bool,
    budget: int,
    seed: int,
) -> PointResult:
    """Evaluate every method (and optionally simulate) at one axis value."""
    point_cfg = cfg.at_axis(axis_value)
    params = build_params(point_cfg)
    noise = build_noise(point_cfg.noise, params.signal_power)
    suppressor = build_suppressor(point_cfg.suppressor, noise, params.signal_power)
    channel = build_channel(point_cfg.channel)
    context = PredictionContext(noise, suppressor, params, channel)
    predictions = {name: method_registry.execute(name, context) for name in methods}

    estimate = None
    if simulate:
        estimate = run_campaign(
            params,
            channel,
            noise,
            suppressor,
            blocks=blocks_for_budget(budget, params.L),
            seed=seed,
            threads=1,
        )
    logger.info(
        f"{cfg.axis.name}={axis_value:g}: "
        + ", ".join(f"{k}={v:.4e}" for k, v in predictions.items())
        + (f", simulated={estimate.ser:.4e}" if estimate is not None else "")
    )
    return PointResult(axis_value=axis_value, predictions=predictions, estimate=estimate)


def run_sweep(
    cfg: SweepConfig,
    simulate: bool | None = None,
    budget: int | None = None,
    seed: int | None = None,
    threads: int | None = None,
) -> list[SerCurve]:
    """
    Run every curve of a sweep.

    Args:
        cfg: Sweep configuration
        simulate: Override of [methods] simulate
        budget: Override of the simulated symbols per axis point
        seed: Override of the master seed
        threads: Worker threads for axis points

    Returns:
        One SerCurve per curve, axis ascending

    Raises:
        ConfigError: If a point cannot be built from the configuration.
    """
    simulate = cfg.methods.simulate if simulate is None else simulate
    budget = budget or cfg.simulation.budget
    seed = cfg.simulation.seed if seed is None else seed
    threads = threads or cfg.simulation.threads
    methods = list(cfg.methods.analytic)
    if not methods and not simulate:
        raise ConfigError("nothing to do: no analytic methods and simulation disabled")

    axis = sorted(cfg.axis.values())
    curves = []
    for curve_index, (label, curve_cfg) in enumerate(cfg.curve_configs()):
        logger.info(f"Curve '{label}': {len(axis)} points on {threads} thread(s)")
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = [
                executor.submit(
                    run_point,
                    curve_cfg,
                    value,
                    methods,
                    simulate,
                    budget,
                    point_seed(seed, curve_index, i),
                )
                for i, value in enumerate(axis)
            ]
            points = [f.result() for f in futures]

        estimates = [p.estimate for p in points if p.estimate is not None]
        curves.append(
            SerCurve(
                label=label,
                axis_name=cfg.axis.name,
                axis_values=tuple(axis),
                predictions={m: tuple(p.predictions[m] for p in points) for m in methods},
                simulated=tuple(e.ser for e in estimates) if simulate else None,
                simulated_half_width=tuple(e.half_width for e in estimates) if simulate else None,
            )
        )
    return curves
