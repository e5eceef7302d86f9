"""
Tests for the single-threshold distortion pdf.

Tests the region weights, the conditional pdfs and the four-component
distortion mixture against the Bussgang moments and a simulated histogram.
"""

import math

import numpy as np
import pytest

from impulse_ser.core.config import Config
from impulse_ser.core.errors import SuppressorError
from impulse_ser.mitigation.distortion_pdf import (
    conditional_pdf_above,
    conditional_signal_pdf_below,
    distortion_component_pdfs,
    fit_white_component,
    make_grid,
    region_weights,
    to_target,
)
from impulse_ser.mitigation.suppressors import apply, bussgang_alpha, make_blanking, make_clipping
from impulse_ser.models.schemas import DiscretePdf, SuppressorSpec
from impulse_ser.noise.gmm_noise import make_bernoulli_gaussian, sample

THRESHOLD = 2.5


@pytest.fixture(scope="module")
def bg_noise():
    """Bernoulli-Gaussian noise at p1 = 0.01, SNR 25 dB, SIR -10 dB."""
    return make_bernoulli_gaussian(0.01, snr_db=25.0, sir_db=-10.0)


@pytest.fixture(scope="module")
def blanking_mixture(bg_noise):
    """Distortion mixture of blanking at THRESHOLD."""
    spec = make_blanking(THRESHOLD)
    alpha = bussgang_alpha(spec, 1.0, bg_noise).alpha
    return distortion_component_pdfs(bg_noise, spec, alpha)


class TestRegionWeights:
    """Tests for region_weights."""

    def test_sum_to_one(self):
        """Test that the four region probabilities sum to 1."""
        weights = region_weights(2.0, 0.99, 1.01, 11.0)

        assert math.fsum(weights) == pytest.approx(1.0, abs=1e-15)

    def test_values(self):
        """Test the closed form c_k = exp(-A^2 / sigma_yk^2)."""
        w_below, i_below, w_above, i_above = region_weights(1.0, 0.9, 1.0, 4.0)

        assert w_above == pytest.approx(0.9 * math.exp(-1.0))
        assert i_above == pytest.approx(0.1 * math.exp(-0.25))
        assert w_below == pytest.approx(0.9 * (1.0 - math.exp(-1.0)))
        assert i_below == pytest.approx(0.1 * (1.0 - math.exp(-0.25)))

    def test_threshold_positive(self):
        """Test that a zero threshold is refused."""
        with pytest.raises(ValueError, match="A_T"):
            region_weights(0.0, 0.9, 1.0, 4.0)


class TestConditionalPdfs:
    """Tests for the conditional signal and noise pdfs."""

    @pytest.fixture
    def grid(self) -> np.ndarray:
        """Grid spanning 10 sigma_y for sigma_x^2 = 1 and sigma_n^2 = 1."""
        return make_grid(10.0, points=4000)

    def test_below_normalized_and_symmetric(self, grid):
        """Test the pdf below the threshold."""
        below = conditional_signal_pdf_below(1.0, 1.0, 1.5, grid)

        assert below.mass == pytest.approx(1.0, abs=1e-12)
        assert below.is_symmetric()

    def test_below_narrows(self, grid):
        """Test that conditioning on a small envelope shrinks the variance."""
        below = conditional_signal_pdf_below(1.0, 1.0, 1.0, grid)

        assert below.variance < 0.5

    def test_below_large_threshold(self, grid):
        """Test that a remote threshold leaves the Gaussian untouched."""
        below = conditional_signal_pdf_below(1.0, 1.0, 30.0, grid)

        assert below.variance == pytest.approx(0.5, rel=1e-3)

    def test_direct_and_fft_agree(self, grid):
        """Test that both convolution methods give the same pdf."""
        direct = conditional_signal_pdf_below(1.0, 0.5, 1.2, grid, method="direct")
        fft = conditional_signal_pdf_below(1.0, 0.5, 1.2, grid, method="fft")

        assert np.max(np.abs(direct.values - fft.values)) < 1e-8 * direct.peak

    def test_total_probability(self, grid):
        """Test that below and above recombine to the unconditional pdf."""
        prob_below = -math.expm1(-(1.5**2) / 2.0)
        full = DiscretePdf(grid=grid, values=np.exp(-(grid**2)) / math.sqrt(math.pi))
        below = conditional_signal_pdf_below(1.0, 1.0, 1.5, grid)
        above = conditional_pdf_above(full, below, prob_below)

        recombined = prob_below * below.values + (1.0 - prob_below) * above.values

        assert np.max(np.abs(recombined - full.values)) < 1e-6 * full.peak

    def test_above_needs_proper_probability(self, grid):
        """Test that prob_below must lie strictly inside (0, 1)."""
        pdf = DiscretePdf(grid=grid, values=np.exp(-(grid**2)) / math.sqrt(math.pi))

        with pytest.raises(ValueError, match="prob_below"):
            conditional_pdf_above(pdf, pdf, 1.0)


class TestDistortionMixture:
    """Tests for distortion_component_pdfs."""

    def test_weights_match_regions(self, bg_noise, blanking_mixture):
        """Test that the two-component grouping reproduces the region weights."""
        expected = region_weights(
            THRESHOLD,
            bg_noise.weights[0],
            1.0 + bg_noise.variances[0],
            1.0 + bg_noise.variances[1],
        )

        assert blanking_mixture.weights == pytest.approx(expected, rel=1e-12)

    def test_variance_matches_bussgang(self, bg_noise, blanking_mixture):
        """Test that the mixture variance equals the Bussgang distortion power within 1%."""
        decomposition = bussgang_alpha(make_blanking(THRESHOLD), 1.0, bg_noise)

        assert blanking_mixture.total_variance == pytest.approx(
            decomposition.distortion_power, rel=0.01
        )

    def test_histogram(self, bg_noise, blanking_mixture):
        """Test the total pdf against a histogram of simulated distortion."""
        n = 400_000
        rng = np.random.default_rng(5)
        x = np.sqrt(0.5) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        noise = sample(bg_noise, n, seed=6)
        d = apply(make_blanking(THRESHOLD), x + noise.values) - blanking_mixture.alpha * x

        edges = np.linspace(-0.2, 0.2, 41)
        counts, _ = np.histogram(d.real, bins=edges)
        density = counts / (n * (edges[1] - edges[0]))
        centers = 0.5 * (edges[:-1] + edges[1:])
        total = blanking_mixture.total_pdf()
        predicted = np.interp(centers, total.grid, total.values)

        assert np.max(np.abs(density - predicted)) < 0.03 * total.peak

    def test_no_suppression(self, bg_noise):
        """Test that without suppression the distortion is the noise itself."""
        mixture = distortion_component_pdfs(bg_noise, SuppressorSpec(kind="none"), 1.0)

        assert mixture.weights == pytest.approx((0.99, 0.01, 0.0, 0.0))
        assert mixture.total_variance == pytest.approx(bg_noise.total_power, rel=1e-3)

    def test_target(self, blanking_mixture):
        """Test that the fit target is symmetric and normalized."""
        target = to_target(blanking_mixture)

        assert target.is_symmetric()
        assert target.mass == pytest.approx(1.0, abs=1e-12)
        assert target.grid.size % 2 == 1

    def test_white_component(self, blanking_mixture):
        """Test the white-below component handed to the fitter."""
        variance, weight = fit_white_component(blanking_mixture)

        assert variance == pytest.approx(blanking_mixture.component_variances[0] / 2.0)
        assert weight == blanking_mixture.weights[0]

    def test_unsupported_kind(self, bg_noise):
        """Test that clipping has no single-threshold distortion pdf."""
        with pytest.raises(SuppressorError, match="single-threshold"):
            distortion_component_pdfs(bg_noise, make_clipping(2.0), 0.9)


class TestGridResolution:
    """Tests for distortion powers that do not depend on how finely pdfs are sampled."""

    @pytest.fixture(scope="class")
    def quiet_noise(self):
        """Impulsive noise with the white component 60 dB below the signal."""
        return make_bernoulli_gaussian(0.01, snr_db=60.0, sir_db=-10.0)

    def test_variance_matches_bussgang_at_high_snr(self, quiet_noise):
        """Test the mixture variance against the Bussgang distortion power at 60 dB SNR."""
        spec = make_blanking(THRESHOLD)
        decomposition = bussgang_alpha(spec, 1.0, quiet_noise)

        mixture = distortion_component_pdfs(
            quiet_noise, spec, decomposition.alpha, method="fft"
        )

        assert mixture.total_variance == pytest.approx(decomposition.distortion_power, rel=0.01)

    def test_doubling_grid_points(self, quiet_noise, mocker):
        """Test that doubling the grid points moves every component variance by under 0.1%."""
        spec = make_blanking(THRESHOLD)
        alpha = bussgang_alpha(spec, 1.0, quiet_noise).alpha

        mocker.patch.object(Config, "DISTORTION_GRID_POINTS", 2500)
        coarse = distortion_component_pdfs(quiet_noise, spec, alpha, method="fft")
        mocker.patch.object(Config, "DISTORTION_GRID_POINTS", 5000)
        fine = distortion_component_pdfs(quiet_noise, spec, alpha, method="fft")

        assert fine.component_variances == pytest.approx(coarse.component_variances, rel=1e-3)

    def test_component_below_output_step(self, quiet_noise):
        """Test that a component narrower than the output step keeps its power."""
        spec = make_blanking(THRESHOLD)
        alpha = bussgang_alpha(spec, 1.0, quiet_noise).alpha
        default = distortion_component_pdfs(quiet_noise, spec, alpha, method="fft")

        coarse = distortion_component_pdfs(
            quiet_noise, spec, alpha, grid=make_grid(50.0, points=100), method="fft"
        )

        assert coarse.component_pdfs[0].variance == pytest.approx(0.0, abs=1e-12)
        assert coarse.component_variances[0] > 0.0
        assert coarse.component_variances == pytest.approx(default.component_variances, rel=1e-9)
