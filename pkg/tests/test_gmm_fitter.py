"""
Tests for the component-by-component mixture fitter.

Covers the local variance function, input checks, recovery of known
mixtures and the reported fit quality.
"""

import math

import numpy as np
import pytest

from impulse_ser.core.errors import FitInputError
from impulse_ser.mitigation.distortion_pdf import (
    distortion_component_pdfs,
    fit_white_component,
    to_target,
)
from impulse_ser.mitigation.gmm_fitter import (
    fit_gmm,
    mixture_pdf,
    reference_mixture,
    variance_function,
)
from impulse_ser.mitigation.suppressors import bussgang_alpha, make_blanking
from impulse_ser.models.schemas import DiscretePdf, GmmSpec
from impulse_ser.noise.gmm_noise import make_bernoulli_gaussian, pdf


@pytest.fixture(scope="module")
def reference_fit():
    """Fit of the sampled four-component reference mixture."""
    target = mixture_pdf(reference_mixture())
    return target, fit_gmm(target)


@pytest.fixture(scope="module")
def distortion_target():
    """Blanking distortion pdf of impulsive noise at SIR -10 dB and its white component."""
    noise = make_bernoulli_gaussian(0.01, snr_db=25.0, sir_db=-10.0)
    spec = make_blanking(2.5)
    mixture = distortion_component_pdfs(noise, spec, bussgang_alpha(spec, 1.0, noise).alpha)
    return to_target(mixture), fit_white_component(mixture)


class TestVarianceFunction:
    """Tests for variance_function."""

    def test_exact_for_gaussian(self):
        """Test that a single Gaussian gives its variance everywhere it is defined."""
        target = mixture_pdf(GmmSpec(weights=(1.0,), variances=(2.0,)), half_width=20.0, step=0.01)

        vf = variance_function(target)

        assert np.count_nonzero(vf.defined) > target.grid.size - 3
        assert vf.values[vf.defined] == pytest.approx(2.0, rel=1e-9)

    def test_at_index_walks_outward(self):
        """Test that undefined points borrow the next defined value outward."""
        target = mixture_pdf(GmmSpec(weights=(1.0,), variances=(1.0,)), half_width=5.0, step=0.5)

        vf = variance_function(target)

        assert not vf.defined[0]
        assert vf.at_index(0) is None
        assert vf.at_index(target.grid.size // 2) == pytest.approx(1.0)

    def test_too_short(self):
        """Test that two points are refused."""
        with pytest.raises(FitInputError, match="at least 3"):
            variance_function(DiscretePdf(grid=np.array([-1.0, 1.0]), values=np.full(2, 0.25)))


class TestFitInput:
    """Tests for fitter input validation."""

    def test_even_grid(self):
        """Test that a grid without a center point is refused."""
        grid = np.linspace(-5.0, 5.0, 1000)
        values = np.exp(-(grid**2) / 2.0) / math.sqrt(2.0 * math.pi)

        with pytest.raises(FitInputError):
            fit_gmm(DiscretePdf(grid=grid, values=values))

    def test_knee_factor_range(self):
        """Test that c0 must lie in (0, 1)."""
        target = mixture_pdf(GmmSpec(weights=(1.0,), variances=(1.0,)), half_width=10.0, step=0.01)

        with pytest.raises(ValueError, match="c0"):
            fit_gmm(target, c0=1.5)


class TestFit:
    """Tests for fit_gmm."""

    def test_single_gaussian(self):
        """Test that a Gaussian target is fitted by one component."""
        target = mixture_pdf(GmmSpec(weights=(1.0,), variances=(3.0,)), half_width=30.0, step=0.01)

        result = fit_gmm(target)

        assert result.K == 1
        assert result.mixture.variances[0] == pytest.approx(3.0, rel=1e-6)
        assert result.max_relative_error < 1e-6

    def test_known_white_component(self):
        """Test exact recovery of a two-component mixture given its white part."""
        spec = GmmSpec(weights=(0.99, 0.01), variances=(0.0032, 10.0))
        target = mixture_pdf(spec, half_width=60.0, step=0.005)

        result = fit_gmm(target, white_component=(0.0032, 0.99))

        assert result.K == 2
        assert result.mixture.variances == pytest.approx((0.0032, 10.0), rel=1e-6)
        assert result.mixture.weights == pytest.approx((0.99, 0.01), rel=1e-6)
        assert result.raw_weight_sum == pytest.approx(1.0, rel=1e-6)

    def test_reference_mixture(self, reference_fit):
        """Test the four-component reference within 10% pdf error and factor-2 variances."""
        _, result = reference_fit
        reference = reference_mixture()

        assert result.K == 4
        assert result.max_relative_error < 0.1
        for fitted, true in zip(result.mixture.variances, reference.variances):
            assert true / 2.0 <= fitted <= 2.0 * true

    def test_knees_increase(self, reference_fit):
        """Test that knee points move outward and stay inside d_max."""
        _, result = reference_fit

        assert len(result.knee_points) == 3
        assert list(result.knee_points) == sorted(result.knee_points)
        assert 0.0 < result.knee_points[-1] < result.d_max

    def test_components_improve_fit(self, reference_fit):
        """Test that the full fit beats the white component alone."""
        _, result = reference_fit

        assert len(result.step_errors) == 4
        assert result.step_errors[-1] < result.step_errors[0]

    def test_kl_recomputed(self, reference_fit):
        """Test that the reported KL divergence matches a recomputation."""
        target, result = reference_fit
        fitted = pdf(result.mixture, target.grid)
        mask = target.values > 1e-300

        kl = float(
            np.sum(
                target.values[mask]
                * (np.log(target.values[mask]) - np.log(np.maximum(fitted[mask], 1e-300)))
            )
            * target.step
        )

        assert result.kl_divergence == pytest.approx(kl, rel=1e-9, abs=1e-15)

    def test_printed_denominator_inflates_weights(self):
        """Test that the second-component denominator over-weights later components."""
        target = mixture_pdf(reference_mixture())

        own = fit_gmm(target, denominator="own", refine=False)
        printed = fit_gmm(target, denominator="printed", refine=False)

        assert printed.raw_weight_sum > own.raw_weight_sum

    def test_complex_mixture(self, reference_fit):
        """Test that complex variances are twice the real-line ones."""
        _, result = reference_fit

        assert result.complex_mixture().variances == pytest.approx(
            tuple(2.0 * v for v in result.mixture.variances)
        )


class TestVarianceClosure:
    """Tests for the variance and weight invariants of fitted mixtures."""

    @pytest.mark.parametrize("anchor", ["knee", "origin"])
    def test_distortion_target(self, distortion_target, anchor):
        """Test that a blanking distortion fit keeps 2 to 4 components and the target variance."""
        target, white = distortion_target

        result = fit_gmm(target, white_component=white, anchor=anchor)

        assert 2 <= result.K <= 4
        assert result.mixture.total_power == pytest.approx(target.variance, rel=0.05)

    def test_distortion_target_complex(self, distortion_target):
        """Test that the complex mixture carries twice the real-line distortion power."""
        target, white = distortion_target

        result = fit_gmm(target, white_component=white)

        assert result.complex_mixture().total_power == pytest.approx(
            2.0 * target.variance, rel=0.05
        )

    def test_reference_mixture(self, reference_fit):
        """Test that the reference fit keeps the target variance within 5%."""
        target, result = reference_fit

        assert result.mixture.total_power == pytest.approx(target.variance, rel=0.05)

    def test_inflated_weights(self):
        """Test that over-weighted tail components are pulled back to the target variance."""
        target = mixture_pdf(reference_mixture())

        printed = fit_gmm(target, denominator="printed", refine=False)

        assert printed.mixture.total_power == pytest.approx(target.variance, rel=0.05)

    @pytest.mark.parametrize("anchor", ["knee", "origin"])
    def test_anchors_agree_on_exact_mixture(self, anchor):
        """Test that both weight anchors recover an exact two-component mixture."""
        spec = GmmSpec(weights=(0.99, 0.01), variances=(0.0032, 10.0))
        target = mixture_pdf(spec, half_width=60.0, step=0.005)

        result = fit_gmm(target, white_component=(0.0032, 0.99), anchor=anchor)

        assert result.K == 2
        assert result.mixture.weights == pytest.approx((0.99, 0.01), rel=1e-6)
        assert result.mixture.variances == pytest.approx((0.0032, 10.0), rel=1e-6)

    def test_strict_knee_factor(self):
        """Test that c0 = 0.99 on an exact two-component mixture still finds both components."""
        spec = GmmSpec(weights=(0.99, 0.01), variances=(0.0032, 10.0))
        target = mixture_pdf(spec, half_width=60.0, step=0.005)

        result = fit_gmm(target, white_component=(0.0032, 0.99), c0=0.99)

        assert result.K == 2
        assert result.mixture.total_power == pytest.approx(target.variance, rel=0.05)
        assert result.mixture.variances[1] == pytest.approx(10.0, rel=1e-6)
