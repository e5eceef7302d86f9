"""
Memoryless impulsive-noise suppressors.

Every suppressor except the genie-aided detector is an envelope gain,
x_hat = beta(|y|) * y, so it commutes with a phase rotation of y. The
Bussgang split x_hat = alpha * x + d is computed per noise component k from
the Rayleigh envelope of y = x + n, whose total power is
sigma_{y,k}^2 = sigma_x^2 + sigma_k^2.
"""

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import logsumexp

from ..core.config import Config
from ..core.errors import SuppressorError
from ..models.schemas import BussgangDecomposition, GmmSpec, SuppressorSpec

logger = logging.getLogger(__name__)

_QUAD_OPTIONS = {"epsabs": 0.0, "epsrel": 1e-9, "limit": 200}


# =============================================================================
# Construction
# =============================================================================


def make_blanking(threshold: float) -> SuppressorSpec:
    return SuppressorSpec(kind="blanking", thresholds=(threshold,))


def make_clipping(threshold: float) -> SuppressorSpec:
    return SuppressorSpec(kind="clipping", thresholds=(threshold,))


def make_clip_blank(clip_threshold: float, blank_threshold: float) -> SuppressorSpec:
    return SuppressorSpec(kind="clip_blank", thresholds=(clip_threshold, blank_threshold))


def posterior_gains(
    thresholds: tuple[float, ...], signal_power: float, noise: GmmSpec
) -> tuple[float, ...]:
    """
    Posterior-weighted MMSE gain per envelope bin.

    beta_m = sum_k P(k | bin m) / (1 + gamma_k), with P(k | bin m) taken from
    the Rayleigh envelope mass of component k inside the bin.
    """
    edges = (0.0, *thresholds, math.inf)
    sigma_y_sq = signal_power + np.asarray(noise.variances)
    wiener = signal_power / sigma_y_sq
    log_p = np.log(np.asarray(noise.weights))

    gains = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        log_mass = -(lo * lo) / sigma_y_sq
        if math.isfinite(hi):
            width = (hi * hi - lo * lo) / sigma_y_sq
            log_mass = log_mass + np.log(-np.expm1(-width))
        log_post = log_p + log_mass
        norm_const = logsumexp(log_post)
        if not np.isfinite(norm_const):
            # empty bin (beyond an infinite threshold); any gain is inert
            gains.append(float(np.exp(log_p) @ wiener))
            continue
        posterior = np.exp(log_post - norm_const)
        gains.append(float(np.clip(posterior @ wiener, 0.0, 1.0)))
    return tuple(gains)


def make_attenuation(
    threshold: float,
    signal_power: float,
    noise: GmmSpec,
    gains: tuple[float, float] | None = None,
) -> SuppressorSpec:
    """Single-threshold attenuator; gains default to the posterior MMSE rule."""
    if gains is None:
        gains = posterior_gains((threshold,), signal_power, noise)  # type: ignore[assignment]
    return SuppressorSpec(
        kind="single_threshold_attenuation", thresholds=(threshold,), gains=tuple(gains)
    )


def make_bas(
    signal_power: float,
    noise: GmmSpec,
    count: int | None = None,
    span: float | None = None,
) -> SuppressorSpec:
    """
    Multi-threshold Bayesian attenuating suppressor.

    With the defaults (10 equispaced thresholds over (0, 5 sigma_y]) this
    stands in for the optimal Bayesian estimator.
    """
    count = count or Config.BAS_THRESHOLD_COUNT
    span = span or Config.BAS_THRESHOLD_SPAN
    sigma_y = math.sqrt(signal_power + noise.total_power)
    thresholds = tuple(span * sigma_y * (m + 1) / count for m in range(count))
    return SuppressorSpec(
        kind="multi_threshold_bas",
        thresholds=thresholds,
        gains=posterior_gains(thresholds, signal_power, noise),
    )


def make_genie_aided(signal_power: float, noise: GmmSpec) -> SuppressorSpec:
    """Per-component Wiener gains beta_k = 1 / (1 + gamma_k)."""
    return SuppressorSpec(
        kind="genie_aided",
        gains=tuple(signal_power / (signal_power + v) for v in noise.variances),
    )


# =============================================================================
# Application
# =============================================================================


def apply(
    spec: SuppressorSpec,
    y: complex | np.ndarray,
    component_label: int | np.ndarray | None = None,
) -> complex | np.ndarray:
    """
    Apply the suppressor to received samples.

    Args:
        spec: Suppressor to apply
        y: Complex sample or array of samples
        component_label: Generating noise component per sample (genie_aided only)

    Raises:
        SuppressorError: If genie_aided is applied without labels.

    Examples:
        >>> apply(make_clipping(1.0), 3 + 4j)
        (0.6000000000000001+0.8j)
    """
    scalar = np.ndim(y) == 0
    y_arr = np.asarray(y, dtype=complex)
    r = np.abs(y_arr)

    if spec.kind == "none":
        out = y_arr
    elif spec.kind == "blanking":
        out = np.where(r <= spec.threshold, y_arr, 0.0)
    elif spec.kind == "clipping":
        a = spec.threshold
        out = np.where(r <= a, y_arr, y_arr * (a / np.maximum(r, 1e-300)))
    elif spec.kind == "clip_blank":
        a1, a2 = spec.thresholds
        clipped = y_arr * (a1 / np.maximum(r, 1e-300))
        out = np.where(r <= a1, y_arr, np.where(r <= a2, clipped, 0.0))
    elif spec.kind in ("single_threshold_attenuation", "multi_threshold_bas"):
        bins = np.searchsorted(np.asarray(spec.thresholds), r, side="left")
        out = np.asarray(spec.gains)[bins] * y_arr
    elif spec.kind == "genie_aided":
        if component_label is None:
            raise SuppressorError("genie_aided suppression needs the noise component labels")
        labels = np.asarray(component_label)
        if labels.size and (labels.min() < 0 or labels.max() >= len(spec.gains)):
            raise SuppressorError(
                f"component label out of range for {len(spec.gains)} genie gains"
            )
        out = np.asarray(spec.gains)[labels] * y_arr
    else:
        raise SuppressorError(f"unknown suppressor kind: {spec.kind}")

    if scalar:
        return complex(out)
    return out


# =============================================================================
# Bussgang decomposition
# =============================================================================


def _tail_moment(threshold: float, sigma_y_sq: np.ndarray) -> np.ndarray:
    """a_k(A) = (1 + A^2/sigma_{y,k}^2) exp(-A^2/sigma_{y,k}^2), with a_k(inf) = 0."""
    if math.isinf(threshold):
        return np.zeros_like(sigma_y_sq)
    u = threshold * threshold / sigma_y_sq
    return (1.0 + u) * np.exp(-u)


def _piecewise_moments(
    thresholds: tuple[float, ...], gains: tuple[float, ...], sigma_y_sq: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """E_k[beta r^2] and E_k[beta^2 r^2] for a piecewise-constant envelope gain."""
    edges = (0.0, *thresholds, math.inf)
    m1 = np.zeros_like(sigma_y_sq)
    m2 = np.zeros_like(sigma_y_sq)
    upper = _tail_moment(edges[0], sigma_y_sq)
    for m, g in enumerate(gains):
        lower, upper = upper, _tail_moment(edges[m + 1], sigma_y_sq)
        m1 += g * (lower - upper)
        m2 += g * g * (lower - upper)
    return m1 * sigma_y_sq, m2 * sigma_y_sq


def _envelope_expectation(
    fn: Callable[[float], float], sigma_y_sq: float, breakpoints: tuple[float, ...]
) -> float:
    """E[fn(r)] over a Rayleigh envelope of total power sigma_y_sq, by adaptive quadrature."""

    def integrand(r: float) -> float:
        return fn(r) * (2.0 * r / sigma_y_sq) * math.exp(-r * r / sigma_y_sq)

    edges = (0.0, *[b for b in breakpoints if math.isfinite(b)], math.inf)
    return math.fsum(
        quad(integrand, lo, hi, **_QUAD_OPTIONS)[0] for lo, hi in zip(edges[:-1], edges[1:])
    )


def _numeric_moments(spec: SuppressorSpec, sigma_y_sq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """E_k[beta r^2] and E_k[beta^2 r^2] for clipping-type gains."""
    if spec.kind == "clipping":
        a = spec.threshold

        def beta(r: float) -> float:
            return 1.0 if r <= a else a / r

    else:
        a1, a2 = spec.thresholds

        def beta(r: float) -> float:
            if r <= a1:
                return 1.0
            return a1 / r if r <= a2 else 0.0

    m1 = np.array(
        [
            _envelope_expectation(lambda r: beta(r) * r * r, float(s), spec.thresholds)
            for s in sigma_y_sq
        ]
    )
    m2 = np.array(
        [
            _envelope_expectation(lambda r: (beta(r) * r) ** 2, float(s), spec.thresholds)
            for s in sigma_y_sq
        ]
    )
    return m1, m2


def bussgang_alpha(
    spec: SuppressorSpec, signal_power: float, noise: GmmSpec
) -> BussgangDecomposition:
    """
    Bussgang factor and distortion power of a suppressor.

    alpha = sum_k p_k E_k[beta r^2] / sigma_{y,k}^2 and, per component,
    sigma_{d,k}^2 = E_k[beta^2 r^2] - 2 alpha (sigma_x^2 / sigma_{y,k}^2) E_k[beta r^2]
    + alpha^2 sigma_x^2. The distortion power is sum_k p_k sigma_{d,k}^2.

    Piecewise-constant gains use the closed-form envelope moments; clipping
    and clip-blank are integrated numerically.

    Raises:
        SuppressorError: If genie_aided gains do not match the noise components.
    """
    p = np.asarray(noise.weights)
    sigma_y_sq = signal_power + np.asarray(noise.variances)

    if spec.kind == "genie_aided":
        if len(spec.gains) != noise.K:
            raise SuppressorError(
                f"genie_aided has {len(spec.gains)} gains for a {noise.K}-component noise"
            )
        beta = np.asarray(spec.gains)
        m1 = beta * sigma_y_sq
        m2 = beta * beta * sigma_y_sq
    elif spec.kind in ("clipping", "clip_blank"):
        m1, m2 = _numeric_moments(spec, sigma_y_sq)
    else:
        thresholds = spec.thresholds if spec.kind != "none" else ()
        m1, m2 = _piecewise_moments(thresholds, spec.bin_gains(), sigma_y_sq)

    alpha = float(p @ (m1 / sigma_y_sq))
    cross = 2.0 * alpha * (signal_power / sigma_y_sq) * m1
    per_component = m2 - cross + alpha * alpha * signal_power
    per_component = np.maximum(per_component, 0.0)
    distortion = float(p @ per_component)

    logger.debug(f"Bussgang {spec.kind}: alpha={alpha:.6g} sigma_d^2={distortion:.6g}")
    return BussgangDecomposition(
        alpha=alpha,
        distortion_power=distortion,
        component_distortion=tuple(float(d) for d in per_component),
    )


def component_distortion_powers(
    spec: SuppressorSpec, signal_power: float, noise: GmmSpec
) -> tuple[float, ...]:
    """Distortion power sigma_{d,k}^2 conditioned on each noise component."""
    return bussgang_alpha(spec, signal_power, noise).component_distortion


def output_snr(spec: SuppressorSpec, signal_power: float, noise: GmmSpec) -> float:
    """Average output SNR rho = alpha^2 sigma_x^2 / sigma_d^2."""
    decomposition = bussgang_alpha(spec, signal_power, noise)
    if decomposition.distortion_power == 0.0:
        return math.inf
    return decomposition.alpha**2 * signal_power / decomposition.distortion_power


# =============================================================================
# Threshold design
# =============================================================================


def _candidate(kind: str, threshold: float, signal_power: float, noise: GmmSpec) -> SuppressorSpec:
    if kind == "blanking":
        return make_blanking(threshold)
    if kind == "clipping":
        return make_clipping(threshold)
    return make_attenuation(threshold, signal_power, noise)


def optimize_threshold(kind: str, signal_power: float, noise: GmmSpec) -> SuppressorSpec:
    """
    Grid-search the threshold that maximizes the output SNR.

    Scans 200 points over (0, 6 sigma_y], then refines once with the same
    number of points between the neighbours of the best point. Attenuation
    gains follow the posterior MMSE rule at every candidate.

    Args:
        kind: blanking, clipping or single_threshold_attenuation
        signal_power: sigma_x^2
        noise: Noise mixture

    Returns:
        Suppressor at the best threshold; an infinite threshold when the
        noise has no impulsive structure

    Raises:
        SuppressorError: If kind has no tunable single threshold.
    """
    if kind not in Config.OPTIMIZABLE_KINDS:
        raise SuppressorError(f"cannot optimize a threshold for kind '{kind}'")

    if noise.is_degenerate():
        logger.info(f"Degenerate noise: {kind} left inactive")
        if kind == "single_threshold_attenuation":
            return SuppressorSpec(kind=kind, thresholds=(math.inf,), gains=(1.0, 1.0))
        return SuppressorSpec(kind=kind, thresholds=(math.inf,))  # type: ignore[arg-type]

    sigma_y = math.sqrt(signal_power + noise.total_power)
    grid = Config.threshold_grid(sigma_y)

    def score(threshold: float) -> float:
        return output_snr(_candidate(kind, threshold, signal_power, noise), signal_power, noise)

    values = [score(a) for a in grid]
    best = int(np.argmax(values))
    best_threshold, best_value = grid[best], values[best]

    lo = grid[best - 1] if best > 0 else grid[0] / 2.0
    hi = grid[best + 1] if best + 1 < len(grid) else grid[best]
    for a in np.linspace(lo, hi, Config.THRESHOLD_GRID_POINTS):
        value = score(float(a))
        if value > best_value:
            best_threshold, best_value = float(a), value

    logger.info(
        f"Optimized {kind}: A_T={best_threshold:.6g} ({best_threshold / sigma_y:.3f} sigma_y), "
        f"rho={10 * math.log10(best_value):.3f} dB"
    )
    return _candidate(kind, best_threshold, signal_power, noise)


def adapt_to_signal_power(
    spec: SuppressorSpec,
    noise: GmmSpec,
    nominal_power: float,
    block_power: float,
    recompute_gains: bool = True,
) -> SuppressorSpec:
    """
    Re-scale a suppressor designed for nominal_power to a fading block.

    Thresholds follow the ratio of received envelope scales; MMSE-derived
    gains are recomputed for the block's signal power.
    """
    if spec.kind == "none":
        return spec
    if spec.kind == "genie_aided":
        return make_genie_aided(block_power, noise)

    scale = math.sqrt((block_power + noise.total_power) / (nominal_power + noise.total_power))
    thresholds = tuple(a * scale for a in spec.thresholds)
    gains = spec.gains
    if recompute_gains and spec.kind in ("single_threshold_attenuation", "multi_threshold_bas"):
        if all(math.isfinite(a) for a in thresholds):
            gains = posterior_gains(thresholds, block_power, noise)
    return SuppressorSpec(kind=spec.kind, thresholds=thresholds, gains=gains)
