"""
Closed-form and semi-closed-form SER of square M-QAM OFDM.

Covers the AWGN reference, Bernoulli-Gaussian and general K-component
impulsive noise through the multinomial count of impulses per block, and
Rayleigh / Rician block fading. Every predictor returns a probability in
[0, 1].
"""

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, gammaln, xlog1py, xlogy
from scipy.stats import binom

from ..core.config import Config
from ..models.schemas import SerQuery, is_square_order

logger = logging.getLogger(__name__)

Kernel = Callable[[np.ndarray], np.ndarray]


def _check_order(M: int) -> None:
    if not is_square_order(M):
        raise ValueError(f"M must be a perfect square >= 4, got {M}")


def _craig(x: float, upper: float) -> float:
    if math.isinf(x):
        return 0.0
    value, _ = quad(lambda phi: math.exp(-x * x / (2.0 * math.sin(phi) ** 2)), 0.0, upper)
    return value / math.pi


def q_function(x: float | np.ndarray, method: str = "erfc") -> float | np.ndarray:
    """
    Gaussian tail probability Q(x).

    Args:
        x: Argument (scalar or array for the erfc method)
        method: "erfc" for 0.5 erfc(x / sqrt 2), "craig" for
            (1/pi) int_0^{pi/2} exp(-x^2 / (2 sin^2 phi)) dphi
    """
    if method == "erfc":
        result = 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
        return float(result) if np.ndim(x) == 0 else result
    if method == "craig":
        if np.ndim(x) != 0:
            return np.array([q_function(float(v), "craig") for v in np.ravel(x)]).reshape(
                np.shape(x)
            )
        xf = float(x)  # type: ignore[arg-type]
        return _craig(xf, math.pi / 2.0) if xf >= 0.0 else 1.0 - _craig(-xf, math.pi / 2.0)
    raise ValueError(f"unknown Q-function method: {method}")


def ser_awgn_mqam(rho: float | np.ndarray, M: int) -> float | np.ndarray:
    """
    Square M-QAM SER in AWGN at SNR rho.

    4 q B0 (1 - q B0) with q = 1 - 1/sqrt(M) and B0 = Q(sqrt(3 rho / (M - 1))).

    Examples:
        >>> ser_awgn_mqam(0.0, 4)
        0.75
    """
    _check_order(M)
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("rho must be non-negative")
    q = 1.0 - 1.0 / math.sqrt(M)
    with np.errstate(invalid="ignore"):
        b0 = 0.5 * erfc(np.sqrt(3.0 * r / (M - 1)) / math.sqrt(2.0))
    result = np.clip(4.0 * q * b0 * (1.0 - q * b0), 0.0, 1.0)
    return float(result) if np.ndim(rho) == 0 else result


def ser_craig_awgn(rho: float, M: int) -> float:
    """AWGN M-QAM SER through Craig's integrals for Q and Q^2."""
    _check_order(M)
    if rho < 0.0:
        raise ValueError("rho must be non-negative")
    q = 1.0 - 1.0 / math.sqrt(M)
    x = math.sqrt(3.0 * rho / (M - 1))
    return 4.0 * q * _craig(x, math.pi / 2.0) - 4.0 * q * q * _craig(x, math.pi / 4.0)


# =============================================================================
# Impulsive noise in flat channels
# =============================================================================


def _rho(L: int, alpha: float, power_sum: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(power_sum > 0.0, L * alpha * alpha / power_sum, np.inf)


def ser_2gmm(query: SerQuery) -> float:
    """
    Bernoulli-Gaussian SER: sum_l Bin(l; L, p1) ser_awgn(L alpha^2 / ((L - l) g0 + l g1)).
    """
    if query.K != 2:
        raise ValueError(f"ser_2gmm needs a two-component query, got K={query.K}")
    L = query.L
    l = np.arange(L + 1)
    w = binom.pmf(l, L, query.weights[1])
    power = (L - l) * query.gammas[0] + l * query.gammas[1]
    ser = ser_awgn_mqam(_rho(L, query.alpha, power), query.M)
    return float(min(max(math.fsum(w * ser), 0.0), 1.0))


def _compositions(query: SerQuery) -> tuple[np.ndarray, np.ndarray]:
    """
    Probability and total relative noise power of every impulse composition.

    Dynamic programming over components: first the binomial impulse count,
    then each impulsive component draws from the remaining impulses with
    its conditional probability; the last takes the remainder. States
    below weight_floor are pruned and states with equal remaining count
    and equal partial power (1e-12 relative) are merged.
    """
    L, p, g = query.L, query.weights, query.gammas
    floor = query.weight_floor
    p_impulse = math.fsum(p[1:])
    scale = L * max(max(g), 1e-300)

    # state key -> [remaining, weight, weight * power]
    states: dict[tuple[int, int], list[float]] = {}

    def add(remaining: int, weight: float, power: float) -> None:
        key = (remaining, int(np.rint(power / scale * 1e12)))
        slot = states.setdefault(key, [remaining, 0.0, 0.0])
        slot[1] += weight
        slot[2] += weight * power

    counts = np.arange(L + 1) if p_impulse > 0.0 else np.zeros(1, dtype=int)
    log_w = (
        gammaln(L + 1)
        - gammaln(counts + 1)
        - gammaln(L - counts + 1)
        + xlogy(counts, p_impulse)
        + xlogy(L - counts, p[0])
    )
    weights = np.exp(log_w)
    skipped = int(np.sum(weights < floor))
    for l, w in zip(counts.tolist(), weights.tolist()):
        if w >= floor:
            add(l, w, (L - l) * g[0])

    K = query.K
    for k in range(1, K - 1):
        tail = math.fsum(p[k:])
        q = p[k] / tail if tail > 0.0 else 0.0
        previous, states = states, {}
        for remaining, weight, weighted_power in previous.values():
            R = int(remaining)
            power = weighted_power / weight
            m = np.arange(R + 1)
            log_c = (
                gammaln(R + 1)
                - gammaln(m + 1)
                - gammaln(R - m + 1)
                + xlogy(m, q)
                + xlog1py(R - m, -q)
            )
            branch = weight * np.exp(log_c)
            for mi, bw in zip(m.tolist(), branch.tolist()):
                if bw >= floor:
                    add(R - mi, bw, power + mi * g[k])
                else:
                    skipped += 1

    final_w = np.array([s[1] for s in states.values()])
    final_power = np.array(
        [s[2] / s[1] + (s[0] * g[-1] if K > 1 else 0.0) for s in states.values()]
    )
    logger.debug(f"Composition sum: {final_w.size} states kept, {skipped} branches pruned")
    return final_w, final_power


def _multinomial_sum(query: SerQuery, kernel: Kernel) -> float:
    if query.K == 1:
        g0 = query.gammas[0]
        rho = np.array([query.alpha**2 / g0 if g0 > 0.0 else np.inf])
        return float(min(max(float(kernel(rho)[0]), 0.0), 1.0))
    weights, power = _compositions(query)
    ser = np.asarray(kernel(_rho(query.L, query.alpha, power)), dtype=float)
    keep = ser >= query.pruning_floor
    logger.debug(f"Per-tuple SER pruning skipped {int(np.sum(~keep))} of {ser.size} terms")
    return float(min(max(math.fsum((weights[keep] * ser[keep]).tolist()), 0.0), 1.0))


def ser_kgmm(query: SerQuery) -> float:
    """
    K-component impulsive noise SER.

    Averages the AWGN SER at rho = L alpha^2 / sum_k l_k gamma_k over the
    multinomial distribution of (l_0, ..., l_{K-1}) impulses per block.
    """

    def kernel(rho: np.ndarray) -> np.ndarray:
        return np.asarray(ser_awgn_mqam(rho, query.M))

    return _multinomial_sum(query, kernel)


def collapse_to_two(query: SerQuery) -> SerQuery:
    """Two-component query with the impulsive components merged at their conditional power."""
    if query.K <= 2:
        return query
    p_impulse = math.fsum(query.weights[1:])
    if p_impulse == 0.0:
        return SerQuery(
            M=query.M,
            L=query.L,
            weights=(1.0,),
            gammas=(query.gammas[0],),
            alpha=query.alpha,
            channel=query.channel,
            pruning_floor=query.pruning_floor,
            weight_floor=query.weight_floor,
        )
    gamma_i = math.fsum(w * g for w, g in zip(query.weights[1:], query.gammas[1:])) / p_impulse
    return SerQuery(
        M=query.M,
        L=query.L,
        weights=(1.0 - p_impulse, p_impulse),
        gammas=(query.gammas[0], gamma_i),
        alpha=query.alpha,
        channel=query.channel,
        pruning_floor=query.pruning_floor,
        weight_floor=query.weight_floor,
    )


def output_snr(query: SerQuery) -> float:
    """Average SNR alpha^2 / sum_k p_k gamma_k of the Gaussian approximation."""
    total = math.fsum(w * g for w, g in zip(query.weights, query.gammas))
    return math.inf if total == 0.0 else query.alpha**2 / total


# =============================================================================
# Fading channels
# =============================================================================


def ser_rayleigh(rho_bar: float, M: int) -> float:
    """Closed-form M-QAM SER averaged over an exponentially distributed SNR."""
    _check_order(M)
    if rho_bar < 0.0:
        raise ValueError("rho_bar must be non-negative")
    if math.isinf(rho_bar):
        return 0.0
    a = math.sqrt(3.0 * rho_bar / (2.0 * (M - 1)))
    u = a / math.sqrt(1.0 + a * a)
    root = math.sqrt(M)
    value = (
        1.0
        - 1.0 / M
        - 2.0 * (root - 1.0) / M * u
        - (4.0 / math.pi) * ((root - 1.0) / root) ** 2 * u * math.atan(u)
    )
    return min(max(value, 0.0), 1.0)


def _rician_nodes(M0: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Midpoint nodes and widths on [0, pi/2] and [0, pi/4]."""
    beta = math.pi / (2.0 * M0)
    full = (np.arange(M0) + 0.5) * beta
    w_full = np.full(M0, beta)
    half_bins = M0 // 2
    quarter = (np.arange(half_bins) + 0.5) * beta
    w_quarter = np.full(half_bins, beta)
    if M0 % 2:
        quarter = np.append(quarter, (half_bins + 0.25) * beta)
        w_quarter = np.append(w_quarter, beta / 2.0)
    return full, w_full, quarter, w_quarter


def _rician_kernel(M: int, K_r: float, M0: int) -> Kernel:
    a, b, c = Config.rician_constants(M)
    full, w_full, quarter, w_quarter = _rician_nodes(M0)
    c_sq = c * c
    k1 = K_r + 1.0

    def integral(rho: np.ndarray, nodes: np.ndarray, widths: np.ndarray) -> np.ndarray:
        cos_sq = np.cos(nodes) ** 2
        with np.errstate(invalid="ignore"):
            h = (k1 * cos_sq[None, :]) / (k1 * cos_sq[None, :] + rho[:, None] * c_sq)
        h = np.where(np.isinf(rho)[:, None], 0.0, h)
        return np.sum(widths[None, :] * h * np.exp(K_r * (h - 1.0)), axis=1)

    def kernel(rho: np.ndarray) -> np.ndarray:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        value = (a * integral(rho, full, w_full) + b * integral(rho, quarter, w_quarter)) / math.pi
        return np.clip(value, 0.0, 1.0)

    return kernel


def ser_rician_w(rho_bar: float, K_r: float, M: int, M0: int | None = None) -> float:
    """
    M-QAM SER averaged over a noncentral chi-square SNR (Rician factor K_r).

    (1/pi)[a I1 + b I2] with I1 over [0, pi/2], I2 over [0, pi/4] of
    h e^{K_r (h - 1)}, h = (K_r+1) cos^2 / ((K_r+1) cos^2 + rho_bar c^2),
    each by a midpoint Riemann sum with step pi / (2 M0).

    Raises:
        UnsupportedModulationError: For M other than 4 and 16.
    """
    if K_r < 0.0:
        raise ValueError(f"K_r must be non-negative, got {K_r}")
    if rho_bar < 0.0:
        raise ValueError("rho_bar must be non-negative")
    M0 = M0 or Config.RICIAN_RIEMANN_POINTS
    kernel = _rician_kernel(M, K_r, M0)
    return float(kernel(np.array([rho_bar]))[0])


def ser_rician_kgmm(query: SerQuery, K_r: float | None = None, M0: int | None = None) -> float:
    """ser_kgmm with the Rician SER replacing the AWGN SER of every impulse composition."""
    K_r = query.channel.rician_k if K_r is None else K_r
    if K_r < 0.0:
        raise ValueError(f"K_r must be non-negative, got {K_r}")
    M0 = M0 or Config.RICIAN_RIEMANN_POINTS
    return _multinomial_sum(query, _rician_kernel(query.M, K_r, M0))
