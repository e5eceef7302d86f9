"""
Impulsive-noise mixtures.

Builds the K-component Gaussian mixtures used throughout the package
(Bernoulli-Gaussian, truncated Middleton Class-A, fitted symmetric
alpha-stable), evaluates their pdf and draws complex circular samples with
the generating component recorded for genie-aided suppression.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize, minimize_scalar
from scipy.special import gamma as gamma_fn
from scipy.special import gammaln, logsumexp, softmax
from scipy.stats import norm

from ..core.config import Config
from ..core.errors import FitError
from ..models.schemas import GmmSpec, NoiseBatch

logger = logging.getLogger(__name__)


def _db_to_power(signal_power: float, ratio_db: float) -> float:
    return signal_power / 10.0 ** (ratio_db / 10.0)


def make_bernoulli_gaussian(
    p1: float, snr_db: float, sir_db: float, signal_power: float = 1.0
) -> GmmSpec:
    """
    Bernoulli-Gaussian (2-GMM) noise.

    Args:
        p1: Impulse probability
        snr_db: Signal to background-noise ratio
        sir_db: Signal to impulsive-noise ratio
        signal_power: sigma_x^2

    Returns:
        GmmSpec with weights (1 - p1, p1)

    Examples:
        >>> make_bernoulli_gaussian(0.01, 25.0, -10.0).variances
        (0.0031622776601683794, 10.0)
    """
    if not 0.0 < p1 < 1.0:
        raise ValueError(f"p1 must lie in (0, 1), got {p1}")
    if not signal_power > 0.0:
        raise ValueError(f"signal_power must be positive, got {signal_power}")
    return GmmSpec(
        weights=(1.0 - p1, p1),
        variances=(_db_to_power(signal_power, snr_db), _db_to_power(signal_power, sir_db)),
    )


def make_class_a(
    A: float,
    snr_db: float,
    sir_db: float,
    signal_power: float = 1.0,
    K: int | None = None,
) -> GmmSpec:
    """
    Middleton Class-A noise truncated to K components.

    The white power comes from snr_db and Middleton's impulsive power from
    sir_db. The first K Poisson terms are kept, their weights renormalized
    and every variance scaled by one factor so that total power equals the
    untruncated sigma_W^2 + sigma_I^2.

    Args:
        A: Impulsiveness index
        snr_db: Signal to white-noise ratio
        sir_db: Signal to impulsive-noise ratio
        signal_power: sigma_x^2
        K: Retained components (defaults to Config.CLASS_A_COMPONENTS)
    """
    K = Config.CLASS_A_COMPONENTS if K is None else K
    if K < 2:
        raise ValueError(f"Class-A truncation needs K >= 2, got {K}")
    if not A > 0.0:
        raise ValueError(f"impulsiveness index A must be positive, got {A}")
    if not signal_power > 0.0:
        raise ValueError(f"signal_power must be positive, got {signal_power}")

    sigma_w = _db_to_power(signal_power, snr_db)
    sigma_i = _db_to_power(signal_power, sir_db)

    k = np.arange(K)
    log_p = -A + k * math.log(A) - gammaln(k + 1)
    weights = np.exp(log_p - logsumexp(log_p))
    variances = sigma_w + sigma_i * k / A

    target_power = sigma_w + sigma_i
    variances = variances * (target_power / float(np.dot(weights, variances)))

    # keep the weight sum exact for GmmSpec validation; the largest weight absorbs the round-off
    weights = weights / math.fsum(weights)
    top = int(np.argmax(weights))
    weights[top] = 1.0 - math.fsum(np.delete(weights, top))

    logger.debug(
        f"Class-A A={A} K={K}: retained Poisson mass "
        f"{math.exp(float(logsumexp(log_p))):.6g}"
    )
    return GmmSpec(
        weights=tuple(float(w) for w in weights),
        variances=tuple(float(v) for v in variances),
    )


def pdf(spec: GmmSpec, x: float | np.ndarray) -> float | np.ndarray:
    """
    Mixture density sum_k p_k G(x; sigma_k^2) on the real line.

    For complex noise built from the same spec each quadrature carries
    sigma_k^2 / 2; evaluate with spec.scaled(0.5) to get that marginal.
    """
    x_arr = np.asarray(x, dtype=float)
    total = np.zeros_like(x_arr)
    for w, v in zip(spec.weights, spec.variances):
        total = total + w * norm.pdf(x_arr, scale=math.sqrt(v))
    if np.ndim(x) == 0:
        return float(total)
    return total


def sample(
    spec: GmmSpec,
    n: int,
    seed: int | np.random.Generator | np.random.SeedSequence | None = None,
) -> NoiseBatch:
    """
    Draw n i.i.d. complex circular samples with component labels.

    A component with variance sigma_k^2 contributes sigma_k^2 / 2 per real
    dimension. Deterministic per seed.
    """
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    labels = rng.choice(spec.K, size=n, p=np.asarray(spec.weights))
    scale = np.sqrt(np.asarray(spec.variances)[labels] / 2.0)
    values = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return NoiseBatch(values=values, labels=labels, K=spec.K)


# =============================================================================
# Symmetric alpha-stable approximation
# =============================================================================


def sas_pdf(x: np.ndarray, alpha: float, gamma: float = 1.0) -> np.ndarray:
    """
    Symmetric alpha-stable density by inversion of exp(-gamma |t|^alpha).

    f(x) = (1/pi) int_0^inf cos(t x) exp(-gamma t^alpha) dt
    """
    x_arr = np.abs(np.asarray(x, dtype=float))
    peak = gamma_fn(1.0 + 1.0 / alpha) / (math.pi * gamma ** (1.0 / alpha))
    cache: dict[float, float] = {}
    out = np.empty_like(x_arr)
    for i, xi in np.ndenumerate(x_arr):
        key = float(xi)
        if key not in cache:
            if key == 0.0:
                cache[key] = peak
            else:
                value, _ = quad(
                    lambda t: math.exp(-gamma * t**alpha),
                    0.0,
                    np.inf,
                    weight="cos",
                    wvar=key,
                    limlst=200,
                )
                cache[key] = max(value / math.pi, 0.0)
        out[i] = cache[key]
    return out


def _generalized_kl(
    params: np.ndarray, x: np.ndarray, f: np.ndarray, h: float, K: int
) -> tuple[float, np.ndarray]:
    """I-divergence sum h [f log(f/g) - f + g] and its gradient."""
    u, s = params[:K], params[K:]
    w = softmax(u)
    v = np.exp(s)
    phi = np.exp(-(x[None, :] ** 2) / (2.0 * v[:, None])) / np.sqrt(2.0 * math.pi * v[:, None])
    g = np.maximum(w @ phi, 1e-300)

    value = float(h * np.sum(f * (np.log(f) - np.log(g)) - f + g))

    r = h * (1.0 - f / g)
    a = phi @ r
    grad_u = w * (a - w @ a)
    grad_s = w * ((phi * (x[None, :] ** 2 / (2.0 * v[:, None]) - 0.5)) @ r)
    return value, np.concatenate([grad_u, grad_s])


@lru_cache(maxsize=32)
def approximate_sas(
    alpha: float,
    K: int = 16,
    fit_range: float = 50.0,
    gamma: float = 1.0,
    grid_points: int = 4001,
) -> GmmSpec:
    """
    Fit a K-component Gaussian mixture to a symmetric alpha-stable pdf.

    Minimizes the generalized KL divergence to the characteristic-function
    inverted density on a uniform grid over [-fit_range, fit_range], over
    softmax weight logits and bounded log-variances (L-BFGS-B). Two starts
    are tried: a geometric variance ladder and the best single Gaussian,
    so the result is never worse than the latter.

    Args:
        alpha: Stability exponent in (0, 2]
        K: Mixture components
        fit_range: Half-width A_N of the fit interval
        gamma: Scale (gamma = sigma^alpha)
        grid_points: Odd number of fit grid points

    Raises:
        FitError: If the fit does not beat the best single Gaussian.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    if not fit_range > 0.0 or not gamma > 0.0:
        raise ValueError("fit_range and gamma must be positive")

    n = grid_points | 1
    x = np.linspace(-fit_range, fit_range, n)
    h = float(x[1] - x[0])
    half = sas_pdf(x[n // 2 :], alpha, gamma)
    f = np.maximum(np.concatenate([half[:0:-1], half]), 1e-300)

    s_lo, s_hi = math.log(h * h / 4.0), math.log(4.0 * fit_range * fit_range)
    u_bound = 50.0
    bounds = [(-u_bound, u_bound)] * K + [(s_lo, s_hi)] * K

    def single(s: float) -> float:
        return _generalized_kl(np.array([0.0, s]), x, f, h, 1)[0]

    best_single = minimize_scalar(single, bounds=(s_lo, s_hi), method="bounded")
    kl_single = float(best_single.fun)

    scale_sq = gamma ** (2.0 / alpha)
    ratio = min(10.0, math.exp((s_hi - s_lo) / (K - 1)))
    first = max(s_lo, math.log(scale_sq) - (K // 4) * math.log(ratio))
    ladder = np.clip(first + np.arange(K) * math.log(ratio), s_lo, s_hi)

    starts = [
        np.concatenate([np.zeros(K), ladder]),
        np.concatenate([np.zeros(K), np.full(K, float(best_single.x))]),
    ]
    best = None
    for start in starts:
        result = minimize(
            _generalized_kl,
            start,
            args=(x, f, h, K),
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": 5000, "maxfun": 20000, "ftol": 1e-15, "gtol": 1e-12},
        )
        logger.debug(f"SaS fit start: KL={result.fun:.3e} after {result.nit} iterations")
        if best is None or result.fun < best.fun:
            best = result
    assert best is not None

    if best.fun > kl_single:
        raise FitError(
            f"alpha-stable fit KL {best.fun:.3e} does not beat the best single "
            f"Gaussian ({kl_single:.3e})"
        )

    weights = softmax(best.x[:K])
    variances = np.exp(best.x[K:])
    order = np.argsort(variances)
    weights = np.maximum(weights[order], 1e-300)
    weights = weights / math.fsum(weights)
    weights[-1] = 1.0 - math.fsum(weights[:-1])
    logger.info(f"Fitted {K}-GMM to SaS(alpha={alpha}): KL={best.fun:.3e}")
    return GmmSpec(
        weights=tuple(float(w) for w in weights),
        variances=tuple(float(v) for v in variances[order]),
    )


def make_sas_noise(
    alpha: float,
    p_impulse: float,
    snr_db: float,
    sir_db: float,
    signal_power: float = 1.0,
    K: int = 16,
    fit_range: float = 50.0,
) -> GmmSpec:
    """
    White background plus a fitted alpha-stable impulsive part.

    The white component carries probability 1 - p_impulse at snr_db; the
    fitted shape supplies the impulsive components, scaled so that their
    conditional power meets sir_db.
    """
    if not 0.0 < p_impulse < 1.0:
        raise ValueError(f"p_impulse must lie in (0, 1), got {p_impulse}")
    shape = approximate_sas(alpha, K=K, fit_range=fit_range)
    impulsive = _db_to_power(signal_power, sir_db) / shape.total_power
    weights = [1.0 - p_impulse] + [p_impulse * w for w in shape.weights]
    variances = [_db_to_power(signal_power, snr_db)] + [v * impulsive for v in shape.variances]
    weights[0] = 1.0 - math.fsum(weights[1:])
    return GmmSpec(weights=tuple(weights), variances=tuple(variances))
