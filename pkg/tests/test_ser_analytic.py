"""
Tests for the analytical SER predictors.

AWGN and Q-function values are checked against 50-digit mpmath
references, the fading averages against numerical quadrature and the
multinomial sums against their collapsed forms.
"""

import math

import mpmath
import pytest
from scipy.integrate import quad

from impulse_ser.analysis.ser_analytic import (
    collapse_to_two,
    output_snr,
    q_function,
    ser_2gmm,
    ser_awgn_mqam,
    ser_craig_awgn,
    ser_kgmm,
    ser_rayleigh,
    ser_rician_kgmm,
    ser_rician_w,
)
from impulse_ser.core.errors import UnsupportedModulationError
from impulse_ser.models.schemas import SerQuery


def _reference_awgn(rho: float, M: int) -> float:
    with mpmath.workdps(50):
        q = 1 - 1 / mpmath.sqrt(M)
        b0 = mpmath.erfc(mpmath.sqrt(mpmath.mpf(3) * rho / (M - 1)) / mpmath.sqrt(2)) / 2
        return float(4 * q * b0 * (1 - q * b0))


@pytest.fixture
def bg_query() -> SerQuery:
    """Bernoulli-Gaussian query at p1 = 0.01, SNR 25 dB, SIR -20 dB."""
    return SerQuery(M=4, L=256, weights=(0.99, 0.01), gammas=(10**-2.5, 100.0))


class TestAwgn:
    """Tests for the Q-function and the AWGN SER."""

    def test_q_at_zero(self):
        """Test Q(0) = 1/2 for both methods."""
        assert q_function(0.0) == 0.5
        assert q_function(0.0, method="craig") == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("x", [-1.0, 0.3, 1.0, 2.5, 4.0])
    def test_craig_matches_erfc(self, x):
        """Test that Craig's integral reproduces erfc."""
        assert q_function(x, method="craig") == pytest.approx(q_function(x), abs=1e-10)

    def test_unknown_method(self):
        """Test that an unknown Q method is refused."""
        with pytest.raises(ValueError, match="Q-function"):
            q_function(1.0, method="table")

    def test_zero_snr(self):
        """Test that 4-QAM at zero SNR errs with probability 3/4."""
        assert ser_awgn_mqam(0.0, 4) == 0.75

    @pytest.mark.parametrize("M", [4, 16, 64])
    @pytest.mark.parametrize("rho", [0.5, 1.0, 10.0, 100.0])
    def test_against_mpmath(self, rho, M):
        """Test the closed form against a 50-digit evaluation."""
        assert ser_awgn_mqam(rho, M) == pytest.approx(_reference_awgn(rho, M), rel=1e-12)

    @pytest.mark.parametrize("M", [4, 16])
    def test_craig_form(self, M):
        """Test that the Craig form agrees with the erfc form."""
        assert ser_craig_awgn(10.0, M) == pytest.approx(ser_awgn_mqam(10.0, M), abs=1e-10)

    def test_infinite_snr(self):
        """Test that an infinite SNR gives no errors."""
        assert ser_awgn_mqam(math.inf, 16) == 0.0

    def test_invalid_order(self):
        """Test that a non-square order is refused."""
        with pytest.raises(ValueError, match="perfect square"):
            ser_awgn_mqam(1.0, 8)

    def test_negative_snr(self):
        """Test that a negative SNR is refused."""
        with pytest.raises(ValueError, match="non-negative"):
            ser_awgn_mqam(-1.0, 4)


class TestMultinomial:
    """Tests for the impulsive-noise SER sums."""

    def test_single_component_is_awgn(self):
        """Test that K = 1 reduces to the AWGN SER at alpha^2 / gamma_0."""
        query = SerQuery(M=4, L=256, weights=(1.0,), gammas=(0.1,))

        assert ser_kgmm(query) == pytest.approx(ser_awgn_mqam(10.0, 4), rel=1e-15)

    def test_two_components_match_binomial(self, bg_query):
        """Test that the K-component sum equals the Bernoulli-Gaussian sum."""
        assert ser_kgmm(bg_query) == pytest.approx(ser_2gmm(bg_query), abs=1e-12)

    def test_split_component(self, bg_query):
        """Test that splitting the impulsive component in two leaves the SER unchanged."""
        split = SerQuery(
            M=4, L=256, weights=(0.99, 0.005, 0.005), gammas=(10**-2.5, 100.0, 100.0)
        )

        assert ser_kgmm(split) == pytest.approx(ser_kgmm(bg_query), abs=1e-12)

    def test_permutation_invariance(self):
        """Test that the order of impulsive components does not matter."""
        a = SerQuery(M=16, L=64, weights=(0.98, 0.015, 0.005), gammas=(0.003, 5.0, 50.0))
        b = SerQuery(M=16, L=64, weights=(0.98, 0.005, 0.015), gammas=(0.003, 50.0, 5.0))

        assert ser_kgmm(a) == pytest.approx(ser_kgmm(b), abs=1e-12)

    def test_pruning_floor(self, bg_query):
        """Test that a lower SER pruning floor changes nothing measurable."""
        fine = SerQuery(
            M=4,
            L=256,
            weights=bg_query.weights,
            gammas=bg_query.gammas,
            pruning_floor=1e-30,
        )

        assert ser_kgmm(fine) == pytest.approx(ser_kgmm(bg_query), abs=1e-12)

    def test_noiseless(self):
        """Test that zero noise power gives zero SER."""
        query = SerQuery(M=4, L=16, weights=(0.9, 0.1), gammas=(0.0, 0.0))

        assert ser_kgmm(query) == 0.0
        assert ser_2gmm(query) == 0.0

    def test_impulses_hurt(self, bg_query):
        """Test that impulses raise the SER above the white-noise-only value."""
        white_only = ser_awgn_mqam(1.0 / bg_query.gammas[0], 4)

        assert ser_kgmm(bg_query) > white_only

    def test_suppression_scale(self, bg_query):
        """Test that a smaller Bussgang scale raises the SER."""
        scaled = SerQuery(M=4, L=256, weights=bg_query.weights, gammas=bg_query.gammas, alpha=0.5)

        assert ser_kgmm(scaled) > ser_kgmm(bg_query)

    def test_ser_2gmm_needs_two_components(self):
        """Test that the binomial sum refuses other component counts."""
        query = SerQuery(M=4, L=16, weights=(0.9, 0.05, 0.05), gammas=(0.01, 1.0, 10.0))

        with pytest.raises(ValueError, match="K=3"):
            ser_2gmm(query)

    def test_collapse_to_two(self):
        """Test that impulsive components merge at their conditional power."""
        query = SerQuery(M=4, L=16, weights=(0.9, 0.06, 0.04), gammas=(0.01, 1.0, 10.0))

        collapsed = collapse_to_two(query)

        assert collapsed.weights == pytest.approx((0.9, 0.1))
        assert collapsed.gammas == pytest.approx((0.01, (0.06 + 0.4) / 0.1))

    def test_output_snr(self, bg_query):
        """Test the Gaussian-approximation SNR."""
        expected = 1.0 / (0.99 * 10**-2.5 + 0.01 * 100.0)

        assert output_snr(bg_query) == pytest.approx(expected)


class TestRayleigh:
    """Tests for ser_rayleigh."""

    def test_zero_snr(self):
        """Test that zero average SNR gives 1 - 1/M."""
        assert ser_rayleigh(0.0, 4) == pytest.approx(0.75)
        assert ser_rayleigh(0.0, 16) == pytest.approx(15.0 / 16.0)

    def test_high_snr_limit(self):
        """Test that the SER vanishes at very high SNR."""
        assert ser_rayleigh(1e9, 4) < 1e-4

    @pytest.mark.parametrize("M", [4, 16])
    @pytest.mark.parametrize("rho_bar", [1.0, 10.0, 100.0])
    def test_against_quadrature(self, rho_bar, M):
        """Test the closed form against the exponential average of the AWGN SER."""
        value, _ = quad(
            lambda t: math.exp(-t) * ser_awgn_mqam(t * rho_bar, M),
            0.0,
            math.inf,
            epsabs=1e-14,
            epsrel=1e-12,
            limit=200,
        )

        assert ser_rayleigh(rho_bar, M) == pytest.approx(value, rel=1e-6)

    def test_decreasing(self):
        """Test that the SER falls with SNR."""
        values = [ser_rayleigh(10 ** (db / 10), 16) for db in range(0, 41, 5)]

        assert all(b < a for a, b in zip(values, values[1:]))


class TestRician:
    """Tests for the Rician predictors."""

    @pytest.mark.parametrize("db", [0, 10, 20, 30, 40])
    def test_no_line_of_sight_is_rayleigh(self, db):
        """Test that K_r = 0 agrees with the Rayleigh closed form within 5%."""
        rho_bar = 10 ** (db / 10)

        assert ser_rician_w(rho_bar, 0.0, 4) == pytest.approx(ser_rayleigh(rho_bar, 4), rel=0.05)

    def test_zero_snr(self):
        """Test that zero SNR gives 3/4 for 4-QAM."""
        assert ser_rician_w(0.0, 5.0, 4) == pytest.approx(0.75)

    def test_line_of_sight_helps(self):
        """Test that a stronger LoS component lowers the SER."""
        values = [ser_rician_w(100.0, k, 4) for k in (0.0, 1.0, 5.0, 10.0)]

        assert all(b < a for a, b in zip(values, values[1:]))

    def test_riemann_points(self):
        """Test that doubling the Riemann points changes the SER by under 1%."""
        coarse = ser_rician_w(100.0, 5.0, 4, M0=11)
        fine = ser_rician_w(100.0, 5.0, 4, M0=22)

        assert fine == pytest.approx(coarse, rel=0.01)

    def test_unsupported_order(self):
        """Test that 64-QAM has no Rician constants."""
        with pytest.raises(UnsupportedModulationError, match="64-QAM"):
            ser_rician_w(10.0, 5.0, 64)

    def test_negative_factor(self):
        """Test that a negative Rician factor is refused."""
        with pytest.raises(ValueError, match="K_r"):
            ser_rician_w(10.0, -1.0, 4)

    def test_single_component_kgmm(self):
        """Test that K = 1 reduces the composition sum to ser_rician_w."""
        query = SerQuery(M=4, L=256, weights=(1.0,), gammas=(0.01,))

        assert ser_rician_kgmm(query, K_r=5.0) == pytest.approx(
            ser_rician_w(100.0, 5.0, 4), abs=1e-15
        )

    def test_kgmm_at_zero_factor_is_rayleigh(self):
        """Test the K = 1, K_r = 0 double collapse."""
        query = SerQuery(M=16, L=256, weights=(1.0,), gammas=(0.01,))

        assert ser_rician_kgmm(query, K_r=0.0) == pytest.approx(ser_rayleigh(100.0, 16), rel=0.05)

    def test_kgmm_unsupported_order(self):
        """Test that the Rician composition sum refuses 64-QAM."""
        query = SerQuery(M=64, L=16, weights=(0.9, 0.1), gammas=(0.01, 1.0))

        with pytest.raises(UnsupportedModulationError):
            ser_rician_kgmm(query, K_r=5.0)

    def test_kgmm_impulses_hurt(self, bg_query):
        """Test that impulses raise the Rician SER."""
        white_only = ser_rician_w(1.0 / bg_query.gammas[0], 10.0, 4)

        assert ser_rician_kgmm(bg_query, K_r=10.0) > white_only
