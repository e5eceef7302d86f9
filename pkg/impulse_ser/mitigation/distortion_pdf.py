"""
Distortion pdf at the output of a single-threshold suppressor.

With d = (beta_Omega - alpha) x + beta_Omega n, the real-part pdf of d is built
per threshold region Omega (below or above A_T) and per noise component as
the convolution of the dilated conditional signal and noise pdfs. The 2K
(region, component) pieces are grouped into four: white below, impulsive
below, white above, impulsive above.

Public functions take powers in the total complex convention; each real
dimension carries half of it.
"""

import logging
import math
from dataclasses import dataclass as std_dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import erf
from scipy.stats import norm

from ..core.config import Config
from ..core.errors import SuppressorError
from ..models.schemas import DiscretePdf, GmmSpec, MixtureOfDistortionComponents, SuppressorSpec

logger = logging.getLogger(__name__)

# regions with less probability than this are treated as empty
_EMPTY_REGION = 1e-300

# wide-grid steps across the below-threshold pdf needed to read its complement off the grid
_RESOLVED_STEPS = 100


def region_weights(
    A_T: float, p0: float, sigma_y0_sq: float, sigma_yI_sq: float
) -> tuple[float, float, float, float]:
    """
    Probabilities of (white below, impulsive below, white above, impulsive above).

    c_0 = exp(-A_T^2 / sigma_y0^2) and c_1 = exp(-A_T^2 / sigma_yI^2), with the
    received envelope powers in total power.
    """
    if not A_T > 0.0:
        raise ValueError(f"A_T must be positive, got {A_T}")
    p1 = 1.0 - p0
    c0 = math.exp(-(A_T * A_T) / sigma_y0_sq)
    c1 = math.exp(-(A_T * A_T) / sigma_yI_sq)
    return (p0 * (1.0 - c0), p1 * (1.0 - c1), p0 * c0, p1 * c1)


def make_grid(half_width: float, points: int | None = None) -> np.ndarray:
    """Symmetric uniform grid with `points` samples per side plus the origin."""
    points = points or Config.DISTORTION_GRID_POINTS
    return np.linspace(-half_width, half_width, 2 * points + 1)


def _convolve(a: np.ndarray, b: np.ndarray, h: float, method: str) -> np.ndarray:
    if method == "fft":
        out = fftconvolve(a, b, mode="same")
    elif method == "direct":
        out = np.convolve(a, b, mode="same")
    else:
        raise ValueError(f"unknown convolution method: {method}")
    return np.maximum(out * h, 0.0)


def _gaussian(grid: np.ndarray, variance: float) -> np.ndarray:
    return norm.pdf(grid, scale=math.sqrt(variance))


def _spike(grid: np.ndarray) -> DiscretePdf:
    values = np.zeros_like(grid)
    values[grid.size // 2] = 1.0 / float(grid[1] - grid[0])
    return DiscretePdf(grid=grid, values=values)


def _finish(grid: np.ndarray, values: np.ndarray) -> DiscretePdf:
    """Clamp, symmetrize and normalize."""
    values = np.maximum(values, 0.0)
    values = 0.5 * (values + values[::-1])
    mass = float(np.sum(values) * (grid[1] - grid[0]))
    if mass <= 0.0:
        return _spike(grid)
    return DiscretePdf(grid=grid, values=values / mass)


def conditional_signal_pdf_below(
    sigma_x_sq: float,
    sigma_n_sq: float,
    A_T: float,
    grid: np.ndarray,
    method: str | None = None,
) -> DiscretePdf:
    """
    Real-part pdf of x conditioned on |x + n| <= A_T.

    f(x) = G(x; s_x) [(K * G(.; s_n))(x)] / B, with
    K(y) = erf(sqrt((A_T^2 - y^2) / (2 s_y))) on |y| <= A_T and
    B = 1 - exp(-A_T^2 / (2 s_y)), where s_x, s_n, s_y = s_x + s_n are the
    per-dimension variances. Swapping the two powers gives the noise pdf.

    The smoothed window K * G is built on its own grid, wide enough to hold
    the threshold disc around every output point, and interpolated onto
    `grid`.

    Args:
        sigma_x_sq: Total power of the variable whose pdf is returned
        sigma_n_sq: Total power of the other addend
        A_T: Envelope threshold
        grid: Symmetric uniform grid (spanning about +-10 sigma_x)
        method: direct or fft convolution
    """
    if not (sigma_x_sq > 0.0 and sigma_n_sq > 0.0):
        raise ValueError("variances must be positive")
    method = method or Config.DISTORTION_CONVOLUTION
    sx, sn = sigma_x_sq / 2.0, sigma_n_sq / 2.0
    sy = sx + sn

    reach = min(A_T, Config.DISTORTION_GRID_SPAN * math.sqrt(sy))
    window_grid = make_grid(float(grid[-1]) + reach, grid.size // 2)
    h = float(window_grid[1] - window_grid[0])

    inside = np.clip(A_T * A_T - window_grid * window_grid, 0.0, None)
    kernel = erf(np.sqrt(inside / (2.0 * sy)))

    smoothing = _gaussian(window_grid, sn)
    smoothing_mass = float(np.sum(smoothing) * h)
    if smoothing_mass > 0.0:
        smoothing = smoothing / smoothing_mass
    else:
        smoothing = _spike(window_grid).values

    window = _convolve(kernel, smoothing, h, method)
    b = -math.expm1(-(A_T * A_T) / (2.0 * sy))
    values = _gaussian(grid, sx) * np.interp(grid, window_grid, window) / b
    return _finish(grid, values)


def conditional_pdf_above(
    unconditional: DiscretePdf, below: DiscretePdf, prob_below: float
) -> DiscretePdf:
    """
    Pdf conditioned on the complementary event: (f - P f_below) / (1 - P).

    Negative round-off is floored at 0 before renormalizing.
    """
    if not 0.0 < prob_below < 1.0:
        raise ValueError(f"prob_below must lie in (0, 1), got {prob_below}")
    values = (unconditional.values - prob_below * below.values) / (1.0 - prob_below)
    negative = float(-values.min()) if values.min() < 0.0 else 0.0
    if negative > 1e-9 * unconditional.peak:
        logger.warning(f"Clamped negative density {negative:.3e} in conditional pdf")
    return _finish(unconditional.grid, values)


@std_dataclass(frozen=True)
class _Piece:
    """Conditional pdf of one addend in one region; no pdf means an exact Gaussian."""

    variance: float
    pdf: DiscretePdf | None = None


def _dilate(piece: _Piece, scale: float, grid: np.ndarray) -> DiscretePdf:
    """
    Pdf of scale * V on `grid`, where V has the piece's pdf.

    A scaled width under half a grid step collapses to a unit spike.
    """
    h = float(grid[1] - grid[0])
    if abs(scale) * math.sqrt(max(piece.variance, 0.0)) < h / 2.0:
        return _spike(grid)
    if piece.pdf is None:
        return _finish(grid, _gaussian(grid, scale * scale * piece.variance))
    values = np.interp(grid / scale, piece.pdf.grid, piece.pdf.values, left=0.0, right=0.0)
    return _finish(grid, values / abs(scale))


def _region_pieces(
    signal_power: float, noise_power: float, A_T: float, method: str
) -> tuple[float, dict[str, _Piece]]:
    """
    Probability below A_T and the conditional (signal, noise) pieces of both regions.

    Each addend gets its own grid of DISTORTION_GRID_SPAN of its own widths.
    When that grid cannot resolve the pdf below the threshold, the pdf
    below moves to a grid cut to the threshold disc and the variance above
    comes from the total variance identity.
    """
    sx, sn = signal_power / 2.0, noise_power / 2.0
    sy = sx + sn
    prob_below = 1.0 if math.isinf(A_T) else -math.expm1(-(A_T * A_T) / (2.0 * sy))

    if 1.0 - prob_below < _EMPTY_REGION:
        return 1.0, {"x_below": _Piece(sx), "n_below": _Piece(sn)}
    if prob_below < _EMPTY_REGION:
        return 0.0, {"x_above": _Piece(sx), "n_above": _Piece(sn)}

    span = Config.DISTORTION_GRID_SPAN
    reach = min(A_T, span * math.sqrt(sy))
    pieces: dict[str, _Piece] = {}
    for name, own, other in (("x", sx, sn), ("n", sn, sx)):
        full_grid = make_grid(span * math.sqrt(own))
        full = _finish(full_grid, _gaussian(full_grid, own))
        cut = reach + span * math.sqrt(other)
        resolved = cut >= _RESOLVED_STEPS * full.step

        if resolved:
            below = conditional_signal_pdf_below(2.0 * own, 2.0 * other, A_T, full_grid, method)
            above = conditional_pdf_above(full, below, prob_below)
            above_variance = above.variance
        else:
            below = conditional_signal_pdf_below(
                2.0 * own, 2.0 * other, A_T, make_grid(cut), method
            )
            sampled = np.interp(full_grid, below.grid, below.values, left=0.0, right=0.0)
            above = conditional_pdf_above(full, _finish(full_grid, sampled), prob_below)
            above_variance = (own - prob_below * below.variance) / (1.0 - prob_below)

        pieces[f"{name}_below"] = _Piece(below.variance, below)
        pieces[f"{name}_above"] = _Piece(max(above_variance, 0.0), above)
    return prob_below, pieces


def _single_threshold(spec: SuppressorSpec) -> tuple[float, float, float]:
    """(A_T, beta_below, beta_above) of a supported suppressor."""
    if spec.kind not in Config.DISTORTION_PDF_KINDS:
        raise SuppressorError(
            f"distortion pdf needs a single-threshold suppressor, got '{spec.kind}'"
        )
    if spec.kind == "none":
        return math.inf, 1.0, 1.0
    beta_below, beta_above = spec.bin_gains()
    return spec.threshold, beta_below, beta_above


def distortion_component_pdfs(
    noise: GmmSpec,
    spec: SuppressorSpec,
    alpha: float,
    grid: np.ndarray | None = None,
    signal_power: float = 1.0,
    method: str | None = None,
) -> MixtureOfDistortionComponents:
    """
    Four-component mixture of the distortion d = x_hat - alpha x.

    Args:
        noise: Noise mixture (component 0 white)
        spec: none, blanking or single_threshold_attenuation
        alpha: Bussgang factor of spec
        grid: Output grid; by default it spans DISTORTION_GRID_SPAN widths
            of the widest scaled region pdf
        signal_power: sigma_x^2
        method: direct or fft convolution

    Component variances combine the conditional piece variances, each read
    on its own grid, so components narrower than the output step keep their
    power.

    Returns:
        MixtureOfDistortionComponents with component variances in total power
    """
    method = method or Config.DISTORTION_CONVOLUTION
    A_T, beta_below, beta_above = _single_threshold(spec)
    gains = {"below": beta_below, "above": beta_above}

    per_component = []
    for v in noise.variances:
        prob_below, pieces = _region_pieces(signal_power, v, A_T, method)
        per_component.append((prob_below, pieces))

    if grid is None:
        widest = 0.0
        for _, pieces in per_component:
            for region, beta in gains.items():
                if f"x_{region}" not in pieces:
                    continue
                sd = abs(beta - alpha) * math.sqrt(pieces[f"x_{region}"].variance)
                sd += abs(beta) * math.sqrt(pieces[f"n_{region}"].variance)
                widest = max(widest, sd)
        grid = make_grid(Config.DISTORTION_GRID_SPAN * max(widest, 1e-12))
    h = float(grid[1] - grid[0])

    groups = {key: np.zeros_like(grid) for key in ("w_below", "i_below", "w_above", "i_above")}
    weights = dict.fromkeys(groups, 0.0)
    powers = dict.fromkeys(groups, 0.0)
    for k, (p, (prob_below, pieces)) in enumerate(zip(noise.weights, per_component)):
        prefix = "w" if k == 0 else "i"
        for region, beta in gains.items():
            mass = prob_below if region == "below" else 1.0 - prob_below
            if mass <= 0.0 or f"x_{region}" not in pieces:
                continue
            x_piece, n_piece = pieces[f"x_{region}"], pieces[f"n_{region}"]
            x_part = _dilate(x_piece, beta - alpha, grid)
            n_part = _dilate(n_piece, beta, grid)
            component = _convolve(x_part.values, n_part.values, h, method)
            component_pdf = _finish(grid, component)
            key = f"{prefix}_{region}"
            groups[key] += p * mass * component_pdf.values
            weights[key] += p * mass
            powers[key] += p * mass * (
                (beta - alpha) ** 2 * x_piece.variance + beta**2 * n_piece.variance
            )

    order = ("w_below", "i_below", "w_above", "i_above")
    pdfs = []
    variances = []
    for key in order:
        if weights[key] <= 0.0:
            pdfs.append(_spike(grid))
            variances.append(0.0)
            continue
        pdf_k = _finish(grid, groups[key] / weights[key])
        pdfs.append(pdf_k)
        variances.append(2.0 * powers[key] / weights[key])

    w = [weights[key] for key in order]
    total = math.fsum(w)
    w = [x / total for x in w]
    logger.debug(
        f"Distortion mixture ({spec.kind}): weights={[f'{x:.4g}' for x in w]} "
        f"variances={[f'{x:.4g}' for x in variances]}"
    )
    return MixtureOfDistortionComponents(
        component_pdfs=tuple(pdfs),
        weights=tuple(w),
        component_variances=tuple(variances),
        alpha=alpha,
    )


def fit_white_component(mixture: MixtureOfDistortionComponents) -> tuple[float, float]:
    """(per-dimension variance, weight) of the white-below component, for the fitter."""
    return mixture.component_variances[0] / 2.0, mixture.weights[0]


def to_target(mixture: MixtureOfDistortionComponents) -> DiscretePdf:
    """Total distortion pdf as a normalized, symmetric fit target."""
    total = mixture.total_pdf()
    return _finish(total.grid, total.values)
