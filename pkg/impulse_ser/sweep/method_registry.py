"""
Registry of SER prediction methods.

Provides decorator-based registration so the sweep runner dispatches by
method name instead of an if/elif chain:

    @method_registry.register("Description")
    def my_method(context: PredictionContext) -> float:
        return ...

Every method receives a PredictionContext that lazily builds the SER
queries it needs and caches them for the other methods at the same axis
point.
"""

import logging
import math
from collections.abc import Callable
from functools import cached_property
from typing import Any

from ..analysis.ser_analytic import (
    collapse_to_two,
    output_snr,
    ser_2gmm,
    ser_awgn_mqam,
    ser_kgmm,
    ser_rayleigh,
    ser_rician_kgmm,
    ser_rician_w,
)
from ..core.errors import ConfigError
from ..mitigation.distortion_pdf import distortion_component_pdfs, fit_white_component, to_target
from ..mitigation.gmm_fitter import fit_gmm
from ..mitigation.suppressors import bussgang_alpha
from ..models.schemas import (
    BussgangDecomposition,
    ChannelSpec,
    FitResult,
    GmmSpec,
    OfdmParams,
    SerQuery,
    SuppressorSpec,
)

logger = logging.getLogger(__name__)

Method = Callable[["PredictionContext"], float]

# Kinds predicted through the distortion pdf and the component-by-component fit
FITTED_KINDS = ("blanking", "single_threshold_attenuation")


class PredictionContext:
    """
    Everything a predictor needs at one axis point.

    Attributes:
        noise: Channel noise mixture (absolute variances)
        suppressor: Suppressor designed for params.signal_power
        params: Link parameters
        channel: Channel the prediction is for
        rician_k: Rician factor of the fading predictors; defaults to the
            channel's, inf on a flat channel
    """

    def __init__(
        self,
        noise: GmmSpec,
        suppressor: SuppressorSpec,
        params: OfdmParams,
        channel: ChannelSpec | None = None,
        rician_k: float | None = None,
    ):
        self.noise = noise
        self.suppressor = suppressor
        self.params = params
        self.channel = channel or ChannelSpec.flat()
        if rician_k is None:
            rician_k = math.inf if self.channel.kind == "flat" else self.channel.rician_k
        self.rician_k = rician_k

    @property
    def mitigated(self) -> bool:
        return self.suppressor.is_active

    @cached_property
    def bussgang(self) -> BussgangDecomposition:
        if not self.mitigated:
            return BussgangDecomposition(
                alpha=1.0,
                distortion_power=self.noise.total_power,
                component_distortion=self.noise.variances,
            )
        return bussgang_alpha(self.suppressor, self.params.signal_power, self.noise)

    def _query(self, mixture: GmmSpec) -> SerQuery:
        return SerQuery.from_noise(
            mixture,
            self.params.signal_power,
            M=self.params.M,
            L=self.params.L,
            alpha=self.bussgang.alpha,
            channel=self.channel,
        )

    @cached_property
    def component_query(self) -> SerQuery:
        """Noise weights with each component's conditional distortion power."""
        if not self.mitigated:
            return self._query(self.noise)
        floor = 1e-300
        mixture = GmmSpec(
            weights=self.noise.weights,
            variances=tuple(max(d, floor) for d in self.bussgang.component_distortion),
        )
        return self._query(mixture)

    @cached_property
    def fit(self) -> FitResult:
        """Component-by-component fit of the single-threshold distortion pdf."""
        mixture = distortion_component_pdfs(
            self.noise,
            self.suppressor,
            self.bussgang.alpha,
            signal_power=self.params.signal_power,
        )
        result = fit_gmm(to_target(mixture), white_component=fit_white_component(mixture))
        logger.info(
            f"Distortion fit: K={result.K}, KL={result.kl_divergence:.3e}, "
            f"max relative error={result.max_relative_error:.3e}"
        )
        return result

    @cached_property
    def kgmm_query(self) -> SerQuery:
        """Query of the K-GMM predictor for this suppressor."""
        if self.mitigated and self.suppressor.kind in FITTED_KINDS:
            return self._query(self.fit.complex_mixture())
        return self.component_query


class MethodRegistry:
    """
    Manages prediction method registration and dispatch.

    Supports two registration methods:
    1. Decorator: @method_registry.register("description")
    2. Method: method_registry.register_method(func, "description")
    """

    def __init__(self) -> None:
        self.methods: dict[str, Method] = {}
        self.descriptions: dict[str, str] = {}

    def register(self, description: str) -> Callable[[Method], Method]:
        """
        Decorator to register a prediction method under its function name.

        Args:
            description: Human-readable description of the method
        """

        def decorator(func: Method) -> Method:
            self.register_method(func, description)
            return func

        return decorator

    def register_method(self, func: Method, description: str) -> None:
        name = func.__name__
        if name in self.methods:
            raise ValueError(f"Method '{name}' is already registered")
        self.methods[name] = func
        self.descriptions[name] = description

    def execute(self, name: str, context: PredictionContext) -> float:
        """
        Run a registered method.

        Raises:
            ConfigError: If the method is not registered.
        """
        if name not in self.methods:
            raise ConfigError(
                f"Method '{name}' not found. Available: {self.list_methods()}",
                field="methods.analytic",
            )
        value = float(self.methods[name](context))
        return min(max(value, 0.0), 1.0)

    def list_methods(self) -> list[str]:
        return list(self.methods)

    def get_method_info(self, name: str) -> dict[str, Any]:
        """
        Get name, description and callable of a method.

        Raises:
            ConfigError: If the method is not registered.
        """
        if name not in self.methods:
            raise ConfigError(f"Method '{name}' not found", field="methods.analytic")
        return {
            "name": name,
            "description": self.descriptions[name],
            "function": self.methods[name],
        }


# Global singleton instance
method_registry = MethodRegistry()


@method_registry.register("AWGN SER at the Bussgang output SNR")
def awgn(context: PredictionContext) -> float:
    return float(ser_awgn_mqam(output_snr(context.component_query), context.params.M))


@method_registry.register("Bernoulli-Gaussian SER with the impulsive components merged")
def gmm2(context: PredictionContext) -> float:
    query = collapse_to_two(context.kgmm_query)
    return ser_2gmm(query) if query.K == 2 else ser_kgmm(query)


@method_registry.register("Multinomial K-GMM SER over impulse compositions")
def kgmm(context: PredictionContext) -> float:
    return ser_kgmm(context.kgmm_query)


@method_registry.register("Rayleigh closed form at the average output SNR")
def rayleigh(context: PredictionContext) -> float:
    return ser_rayleigh(output_snr(context.component_query), context.params.M)


@method_registry.register("Rician (Rice-W) SER at the average output SNR")
def rician_w(context: PredictionContext) -> float:
    rho = output_snr(context.component_query)
    if math.isinf(context.rician_k):
        return float(ser_awgn_mqam(rho, context.params.M))
    return ser_rician_w(rho, context.rician_k, context.params.M)


@method_registry.register("Multinomial K-GMM SER with Rician per-composition kernels")
def rician_kgmm(context: PredictionContext) -> float:
    if math.isinf(context.rician_k):
        return ser_kgmm(context.kgmm_query)
    return ser_rician_kgmm(context.kgmm_query, K_r=context.rician_k)
