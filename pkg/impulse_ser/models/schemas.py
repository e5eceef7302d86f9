"""
Data models for impulse-ser.

These Pydantic dataclasses define the contracts between components:
- GmmSpec, NoiseSample, NoiseBatch: impulsive-noise mixtures and their samples
- SuppressorSpec, BussgangDecomposition: nonlinear suppressors and their gain split
- DiscretePdf, MixtureOfDistortionComponents: numerically integrated distortion pdfs
- VarianceFunction, FitResult: component-by-component mixture fits
- SerQuery, SerCurve: analytic SER inputs and sweep outputs
- OfdmParams, ChannelSpec, SerEstimate: link simulator inputs and outputs

Power quantities use the total complex power convention unless a field says
otherwise. A mixture component with variance s yields complex samples with
s/2 per real dimension.
"""

import math
from collections.abc import Iterator, Sequence
from pathlib import Path
from typing import Literal, overload

import numpy as np
import yaml
from pydantic import ConfigDict
from pydantic.dataclasses import dataclass
from scipy.stats import norm

ArrayConfig = ConfigDict(arbitrary_types_allowed=True)

# sampled pdfs: |mass - 1| and mirror mismatch relative to the peak
PDF_MASS_TOLERANCE = 1e-4
PDF_SYMMETRY_TOLERANCE = 1e-6

SuppressorKind = Literal[
    "none",
    "blanking",
    "clipping",
    "clip_blank",
    "single_threshold_attenuation",
    "multi_threshold_bas",
    "genie_aided",
]
ChannelKind = Literal["flat", "rayleigh_block", "rician_block"]


def is_square_order(M: int) -> bool:
    root = math.isqrt(M)
    return M >= 4 and root * root == M


# =============================================================================
# Noise
# =============================================================================


@dataclass(frozen=True)
class GmmSpec:
    """
    K-component zero-mean Gaussian mixture.

    Index 0 is the background ("white") component by convention; indices
    k >= 1 are impulsive.

    Attributes:
        weights: Probability per component, summing to 1
        variances: Per-component variance (power units)

    Examples:
        >>> spec = GmmSpec(weights=(0.99, 0.01), variances=(0.00316, 10.0))
        >>> spec.K
        2
    """

    weights: tuple[float, ...]
    variances: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.weights) < 1:
            raise ValueError("GmmSpec needs at least one component")
        if len(self.weights) != len(self.variances):
            raise ValueError(
                f"weights and variances differ in length: "
                f"{len(self.weights)} != {len(self.variances)}"
            )
        if any(not (0.0 < w <= 1.0) for w in self.weights):
            raise ValueError(f"weights must lie in (0, 1], got {self.weights}")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(self.weights)!r}")
        if any(not (v > 0.0 and math.isfinite(v)) for v in self.variances):
            raise ValueError(f"variances must be positive and finite, got {self.variances}")

    @property
    def K(self) -> int:
        return len(self.weights)

    @property
    def total_power(self) -> float:
        """Mixture variance sum_k p_k sigma_k^2."""
        return math.fsum(p * v for p, v in zip(self.weights, self.variances, strict=True))

    @property
    def impulse_probability(self) -> float:
        """p_I: probability that an impulsive component is active."""
        return math.fsum(self.weights[1:])

    @property
    def impulsive_variance(self) -> float:
        """Variance of the impulsive part given an impulse, 0 for K = 1."""
        p_i = self.impulse_probability
        if p_i == 0.0:
            return 0.0
        return math.fsum(p * v for p, v in zip(self.weights[1:], self.variances[1:])) / p_i

    def gammas(self, signal_power: float) -> tuple[float, ...]:
        """Noise-to-signal ratios gamma_k = sigma_k^2 / sigma_x^2."""
        return tuple(v / signal_power for v in self.variances)

    def snr_db(self, signal_power: float) -> float:
        return 10.0 * math.log10(signal_power / self.variances[0])

    def sir_db(self, signal_power: float) -> float:
        sigma_i = self.impulsive_variance
        return math.inf if sigma_i == 0.0 else 10.0 * math.log10(signal_power / sigma_i)

    def is_degenerate(self) -> bool:
        """True when every component has the same variance (plain Gaussian)."""
        return self.K == 1 or max(self.variances) - min(self.variances) <= 1e-12 * max(
            self.variances
        )

    def scaled(self, factor: float) -> "GmmSpec":
        """Same weights, every variance multiplied by factor."""
        return GmmSpec(weights=self.weights, variances=tuple(v * factor for v in self.variances))

    def to_config_block(self) -> str:
        """Serialize to the plain-text weights/variances block."""
        return yaml.safe_dump(
            {"weights": list(self.weights), "variances": list(self.variances)},
            sort_keys=False,
            default_flow_style=None,
        )

    @classmethod
    def from_config_block(cls, text: str) -> "GmmSpec":
        """Parse a block written by to_config_block."""
        data = yaml.safe_load(text)
        if not isinstance(data, dict) or "weights" not in data or "variances" not in data:
            raise ValueError("config block must define 'weights' and 'variances'")
        return cls(
            weights=tuple(float(w) for w in data["weights"]),
            variances=tuple(float(v) for v in data["variances"]),
        )


@dataclass(frozen=True)
class NoiseSample:
    """One complex noise amplitude plus the index of the component that produced it."""

    value: complex
    component: int


@dataclass(frozen=True, eq=False, config=ArrayConfig)
class NoiseBatch(Sequence[NoiseSample]):
    """
    Array-backed sequence of NoiseSample.

    Attributes:
        values: Complex noise amplitudes
        labels: Component index per amplitude
        K: Component count of the generating mixture
    """

    values: np.ndarray
    labels: np.ndarray
    K: int

    def __post_init__(self) -> None:
        if self.values.shape != self.labels.shape or self.values.ndim != 1:
            raise ValueError("values and labels must be 1-D arrays of equal length")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.K):
            raise ValueError(f"component labels must lie in [0, {self.K})")

    def __len__(self) -> int:
        return int(self.values.size)

    @overload
    def __getitem__(self, index: int) -> NoiseSample: ...

    @overload
    def __getitem__(self, index: slice) -> "NoiseBatch": ...

    def __getitem__(self, index: int | slice) -> "NoiseSample | NoiseBatch":
        if isinstance(index, slice):
            return NoiseBatch(values=self.values[index], labels=self.labels[index], K=self.K)
        return NoiseSample(value=complex(self.values[index]), component=int(self.labels[index]))

    def __iter__(self) -> Iterator[NoiseSample]:
        for i in range(len(self)):
            yield self[i]

    def component_counts(self) -> tuple[int, ...]:
        return tuple(int(c) for c in np.bincount(self.labels, minlength=self.K))


# =============================================================================
# Suppressors
# =============================================================================


@dataclass(frozen=True)
class SuppressorSpec:
    """
    Memoryless nonlinear suppressor.

    Attributes:
        kind: Suppressor family
        thresholds: Ascending envelope thresholds A_1..A_M (empty for none and GAD).
            A single infinite threshold marks an inactive suppressor.
        gains: Attenuation per envelope bin (M+1 values for BAS, two for the
            single-threshold attenuator, one per noise component for GAD)

    Examples:
        >>> SuppressorSpec(kind="blanking", thresholds=(3.0,))
        >>> SuppressorSpec(
        ...     kind="single_threshold_attenuation", thresholds=(3.0,), gains=(0.99, 0.1)
        ... )
    """

    kind: SuppressorKind
    thresholds: tuple[float, ...] = ()
    gains: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        t = self.thresholds
        if any(not a > 0.0 for a in t):
            raise ValueError(f"thresholds must be positive, got {t}")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError(f"thresholds must be strictly increasing, got {t}")
        if any(not 0.0 <= g <= 1.0 for g in self.gains):
            raise ValueError(f"gains must lie in [0, 1], got {self.gains}")

        expected_thresholds = {
            "none": 0,
            "blanking": 1,
            "clipping": 1,
            "clip_blank": 2,
            "single_threshold_attenuation": 1,
            "genie_aided": 0,
        }
        if self.kind in expected_thresholds and len(t) != expected_thresholds[self.kind]:
            raise ValueError(
                f"{self.kind} needs {expected_thresholds[self.kind]} threshold(s), got {len(t)}"
            )
        if self.kind == "multi_threshold_bas" and not t:
            raise ValueError("multi_threshold_bas needs at least one threshold")
        if self.kind in ("single_threshold_attenuation", "multi_threshold_bas"):
            if len(self.gains) != len(t) + 1:
                raise ValueError(
                    f"{self.kind} needs {len(t) + 1} gains for {len(t)} thresholds, "
                    f"got {len(self.gains)}"
                )
        elif self.kind == "genie_aided":
            if not self.gains:
                raise ValueError("genie_aided needs one gain per noise component")
        elif self.gains:
            raise ValueError(f"{self.kind} takes no gains")

    @property
    def is_active(self) -> bool:
        return self.kind != "none" and not (
            len(self.thresholds) == 1 and math.isinf(self.thresholds[0])
        )

    @property
    def threshold(self) -> float:
        """The single threshold A_T of a one-threshold kind."""
        if len(self.thresholds) != 1:
            raise ValueError(f"{self.kind} has {len(self.thresholds)} thresholds, not one")
        return self.thresholds[0]

    def bin_gains(self) -> tuple[float, ...]:
        """Gain per envelope bin for the piecewise-constant kinds."""
        if self.kind == "none":
            return (1.0,)
        if self.kind == "blanking":
            return (1.0, 0.0)
        if self.kind in ("single_threshold_attenuation", "multi_threshold_bas"):
            return self.gains
        raise ValueError(f"{self.kind} has no piecewise-constant gain")


@dataclass(frozen=True)
class BussgangDecomposition:
    """
    Bussgang split of a suppressor output into alpha * x + d.

    Attributes:
        alpha: Signal scaling factor
        distortion_power: sigma_d^2 = E|x_hat - alpha x|^2
        component_distortion: Per noise component distortion powers sigma_{d,k}^2
    """

    alpha: float
    distortion_power: float
    component_distortion: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0 + 1e-9:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.distortion_power < 0.0 or any(d < 0.0 for d in self.component_distortion):
            raise ValueError("distortion powers must be non-negative")


# =============================================================================
# Discrete pdfs and fits
# =============================================================================


@dataclass(frozen=True, eq=False, config=ArrayConfig)
class DiscretePdf:
    """
    Zero-mean symmetric density sampled on a uniform amplitude grid.

    The grid is symmetric about 0, the density mirrors within
    PDF_SYMMETRY_TOLERANCE of its peak and sums to 1 within
    PDF_MASS_TOLERANCE.

    Attributes:
        grid: Uniform amplitude points d_i
        values: Density at each grid point
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if self.grid.size < 2:
            raise ValueError("a discrete pdf needs at least two grid points")
        steps = np.diff(self.grid)
        if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
            raise ValueError("grid must be uniform and increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0.0):
            raise ValueError("density values must be finite and non-negative")
        if abs(self.mass - 1.0) > PDF_MASS_TOLERANCE:
            raise ValueError(f"density must be normalized, mass is {self.mass!r}")
        if not self.is_symmetric(PDF_SYMMETRY_TOLERANCE):
            raise ValueError("density must be symmetric about 0 on a symmetric grid")

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def mass(self) -> float:
        return float(np.sum(self.values) * self.step)

    @property
    def variance(self) -> float:
        """Second moment sum d_i^2 f(d_i) h (zero-mean pdfs)."""
        return float(np.sum(self.grid**2 * self.values) * self.step)

    @property
    def peak(self) -> float:
        return float(self.values.max())

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        if not np.allclose(self.grid, -self.grid[::-1], rtol=0.0, atol=1e-9 * self.step):
            return False
        scale = max(self.peak, 1e-300)
        return bool(np.max(np.abs(self.values - self.values[::-1])) <= tol * scale)

    def to_csv(self, path: str | Path) -> Path:
        """Write a two-column amplitude,density CSV with '#' header lines."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [
            "# impulse-ser discrete pdf",
            f"# points={self.grid.size} step={self.step!r} mass={self.mass!r}",
            "amplitude,density",
        ]
        lines.extend(f"{d!r},{f!r}" for d, f in zip(self.grid.tolist(), self.values.tolist()))
        path.write_text("\n".join(lines) + "\n")
        return path

    @classmethod
    def from_csv(cls, path: str | Path) -> "DiscretePdf":
        """Read a two-column CSV; '#' lines and a non-numeric header row are skipped."""
        grid: list[float] = []
        values: list[float] = []
        for raw in Path(path).read_text().splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"expected two columns, got: {line!r}")
            try:
                d, f = float(parts[0]), float(parts[1])
            except ValueError:
                if not grid:
                    continue
                raise
            grid.append(d)
            values.append(f)
        return cls(grid=np.asarray(grid), values=np.asarray(values))


@dataclass(frozen=True, eq=False, config=ArrayConfig)
class MixtureOfDistortionComponents:
    """
    Four-component scaled mixture of the distortion d = x_hat - alpha x.

    Component order: white below threshold, impulsive below, white above,
    impulsive above.

    Attributes:
        component_pdfs: Real-line pdfs of the four components
        weights: Mixture weights w_1..w_4
        component_variances: Total complex power of each component
        alpha: Bussgang factor the pdfs were built with
    """

    component_pdfs: tuple[DiscretePdf, ...]
    weights: tuple[float, ...]
    component_variances: tuple[float, ...]
    alpha: float

    def __post_init__(self) -> None:
        if not len(self.component_pdfs) == len(self.weights) == len(self.component_variances) == 4:
            raise ValueError("a distortion mixture has exactly four components")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(self.weights)!r}")

    @property
    def total_variance(self) -> float:
        return math.fsum(w * v for w, v in zip(self.weights, self.component_variances))

    def total_pdf(self) -> DiscretePdf:
        grid = self.component_pdfs[0].grid
        values = sum(
            (w * c.values for w, c in zip(self.weights, self.component_pdfs)),
            start=np.zeros_like(grid),
        )
        return DiscretePdf(grid=grid, values=values)


@dataclass(frozen=True, eq=False, config=ArrayConfig)
class VarianceFunction:
    """
    Local Gaussian variance estimate of a sampled pdf.

    Undefined points hold NaN. Like the pdf it is read from, the estimate
    mirrors about the center: the same points are undefined on both sides
    and defined mirror values agree within PDF_SYMMETRY_TOLERANCE.
    """

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        defined = np.isfinite(self.values)
        if not np.array_equal(defined, defined[::-1]):
            raise ValueError("variance function must be undefined at mirrored points alike")
        v, mirror = self.values[defined], self.values[::-1][defined]
        if np.any(v <= 0.0):
            raise ValueError("defined local variances must be positive")
        if np.any(np.abs(v - mirror) > PDF_SYMMETRY_TOLERANCE * np.maximum(v, mirror)):
            raise ValueError("variance function must be symmetric about the center")

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.values)

    def at_index(self, i: int) -> float | None:
        """Value at index i, or at the next defined point outward (None if none)."""
        n = self.grid.size
        center = n // 2
        direction = 1 if i >= center else -1
        j = i
        while 0 <= j < n:
            if np.isfinite(self.values[j]):
                return float(self.values[j])
            j += direction
        return None


@dataclass(frozen=True)
class FitResult:
    """
    Component-by-component Gaussian mixture fit of a symmetric pdf.

    Attributes:
        mixture: Fitted mixture in the real-line (per dimension) convention
        knee_points: Knee amplitudes found for components 2, 3 and 4
        d_max: Amplitude where the target falls below the pdf tolerance
        raw_weight_sum: Sum of fitted weights before renormalization
        kl_divergence: KL(target || fit) on the target support
        max_relative_error: Sup-norm relative error where target > 1e-10
        step_errors: Sup-norm relative error of the first 1..K components
    """

    mixture: GmmSpec
    knee_points: tuple[float, ...]
    d_max: float
    raw_weight_sum: float
    kl_divergence: float
    max_relative_error: float
    step_errors: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.mixture.K > 4:
            raise ValueError(f"fit has at most four components, got {self.mixture.K}")

    @property
    def K(self) -> int:
        return self.mixture.K

    def complex_mixture(self) -> GmmSpec:
        """Fitted mixture with variances in total complex power."""
        return self.mixture.scaled(2.0)


# =============================================================================
# SER analysis
# =============================================================================


@dataclass(frozen=True)
class ChannelSpec:
    """
    Block-fading channel description.

    Attributes:
        kind: flat, rayleigh_block or rician_block
        tap_powers: Per-tap power sigma_l^2, summing to 1
        rician_k: LoS-to-scattered power ratio on tap 0 (rician_block only)
    """

    kind: ChannelKind = "flat"
    tap_powers: tuple[float, ...] = (1.0,)
    rician_k: float = 0.0

    def __post_init__(self) -> None:
        if not self.tap_powers or any(p < 0.0 for p in self.tap_powers):
            raise ValueError("tap powers must be a non-empty list of non-negative values")
        if abs(math.fsum(self.tap_powers) - 1.0) > 1e-12:
            raise ValueError(f"tap powers must sum to 1, got {math.fsum(self.tap_powers)!r}")
        if self.rician_k < 0.0:
            raise ValueError(f"rician_k must be non-negative, got {self.rician_k}")
        if self.kind == "flat" and len(self.tap_powers) != 1:
            raise ValueError("flat channel has exactly one tap")

    @property
    def taps(self) -> int:
        return len(self.tap_powers)

    @classmethod
    def flat(cls) -> "ChannelSpec":
        return cls()

    @classmethod
    def exponential(
        cls, kind: ChannelKind, taps: int, decay: float, rician_k: float = 0.0
    ) -> "ChannelSpec":
        """Exponential power-delay profile sigma_l^2 ∝ exp(-decay * l), normalized."""
        if kind == "flat":
            return cls.flat()
        raw = np.exp(-decay * np.arange(taps))
        powers = raw / raw.sum()
        powers[-1] = 1.0 - math.fsum(powers[:-1])
        return cls(kind=kind, tap_powers=tuple(float(p) for p in powers), rician_k=rician_k)


@dataclass(frozen=True)
class SerQuery:
    """
    Inputs of the multinomial SER predictors.

    Attributes:
        M: Square QAM order
        L: Subcarrier count
        weights: Mixture weights p_k
        gammas: Relative component powers gamma_k = sigma_k^2 / sigma_x^2
        alpha: Bussgang scale (1 for unmitigated)
        channel: Channel the prediction is for
        pruning_floor: Per-tuple SER below which a term is skipped
        weight_floor: Branch probability below which a composition is pruned
    """

    M: int
    L: int
    weights: tuple[float, ...]
    gammas: tuple[float, ...]
    alpha: float = 1.0
    channel: ChannelSpec = ChannelSpec()
    pruning_floor: float = 1e-20
    weight_floor: float = 1e-18

    def __post_init__(self) -> None:
        if not is_square_order(self.M):
            raise ValueError(f"M must be a perfect square >= 4, got {self.M}")
        if self.L < 1:
            raise ValueError(f"L must be at least 1, got {self.L}")
        if len(self.weights) != len(self.gammas) or not self.weights:
            raise ValueError("weights and gammas must be non-empty and of equal length")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12 or any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be non-negative and sum to 1")
        if any(g < 0.0 for g in self.gammas):
            raise ValueError("gammas must be non-negative")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def K(self) -> int:
        return len(self.weights)

    @classmethod
    def from_noise(
        cls,
        noise: GmmSpec,
        signal_power: float,
        M: int,
        L: int,
        alpha: float = 1.0,
        **kwargs: object,
    ) -> "SerQuery":
        return cls(
            M=M,
            L=L,
            weights=noise.weights,
            gammas=noise.gammas(signal_power),
            alpha=alpha,
            **kwargs,  # type: ignore[arg-type]
        )


@dataclass(frozen=True)
class SerCurve:
    """
    One SER curve over a sweep axis.

    Attributes:
        label: Curve label, e.g. "A=0.1" or "p1=0.01"
        axis_name: sir_db or snr_db
        axis_values: Axis points, ascending
        predictions: Method name -> SER per axis point
        simulated: Simulated SER per axis point
        simulated_half_width: Wilson half-width per axis point
    """

    label: str
    axis_name: str
    axis_values: tuple[float, ...]
    predictions: dict[str, tuple[float, ...]]
    simulated: tuple[float, ...] | None = None
    simulated_half_width: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        n = len(self.axis_values)
        series = list(self.predictions.values())
        if self.simulated is not None:
            series.append(self.simulated)
        for values in series:
            if len(values) != n:
                raise ValueError("every series must have one value per axis point")
            if any(not 0.0 <= v <= 1.0 for v in values):
                raise ValueError("SER values must lie in [0, 1]")


# =============================================================================
# Link simulation
# =============================================================================


@dataclass(frozen=True)
class OfdmParams:
    """
    OFDM link parameters.

    Attributes:
        L: Subcarrier count
        M: Square QAM order
        cp_len: Cyclic prefix length in samples
        signal_power: Time-domain signal power sigma_x^2
    """

    L: int = 256
    M: int = 4
    cp_len: int = 7
    signal_power: float = 1.0

    def __post_init__(self) -> None:
        if not is_square_order(self.M):
            raise ValueError(f"M must be a perfect square >= 4, got {self.M}")
        if self.L < 1 or self.cp_len < 0:
            raise ValueError("L must be positive and cp_len non-negative")
        if not self.signal_power > 0.0:
            raise ValueError("signal_power must be positive")


@dataclass(frozen=True)
class SerEstimate:
    """
    Monte Carlo SER estimate.

    Attributes:
        errors: Symbol errors counted
        tried: Symbols tried
        dropped_blocks: Blocks dropped for near-singular equalization
        component_counts: Noise samples drawn per mixture component
        confidence: Two-sided confidence level of the Wilson interval
    """

    errors: int
    tried: int
    dropped_blocks: int = 0
    component_counts: tuple[int, ...] = ()
    confidence: float = 0.95

    def __post_init__(self) -> None:
        if self.tried < 0 or not 0 <= self.errors <= self.tried:
            raise ValueError(f"need 0 <= errors <= tried, got {self.errors}/{self.tried}")

    @property
    def ser(self) -> float:
        return self.errors / self.tried if self.tried else 0.0

    def wilson_interval(self) -> tuple[float, float]:
        """(center, half_width) of the Wilson score interval."""
        if self.tried == 0:
            return 0.5, 0.5
        z = float(norm.ppf(0.5 + self.confidence / 2.0))
        n = self.tried
        p = self.ser
        denom = 1.0 + z * z / n
        center = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
        return center, half

    @property
    def half_width(self) -> float:
        return self.wilson_interval()[1]

    def merged(self, other: "SerEstimate") -> "SerEstimate":
        counts = self.component_counts or tuple(0 for _ in other.component_counts)
        others = other.component_counts or tuple(0 for _ in counts)
        return SerEstimate(
            errors=self.errors + other.errors,
            tried=self.tried + other.tried,
            dropped_blocks=self.dropped_blocks + other.dropped_blocks,
            component_counts=tuple(a + b for a, b in zip(counts, others, strict=True)),
            confidence=self.confidence,
        )
