"""
Tests for data models.

Tests the Pydantic dataclasses and sweep models to ensure proper
validation and serialization.
"""

import math

import numpy as np
import pytest

from impulse_ser.models.schemas import (
    ChannelSpec,
    DiscretePdf,
    GmmSpec,
    NoiseBatch,
    NoiseSample,
    SerCurve,
    SerEstimate,
    SerQuery,
    SuppressorSpec,
    VarianceFunction,
)
from impulse_ser.models.sweep import AxisConfig, CurvesConfig, SweepConfig


class TestGmmSpec:
    """Tests for GmmSpec dataclass."""

    def test_basic_mixture(self):
        """Test creating a two-component mixture."""
        spec = GmmSpec(weights=(0.99, 0.01), variances=(0.01, 10.0))

        assert spec.K == 2
        assert spec.total_power == pytest.approx(0.99 * 0.01 + 0.01 * 10.0)
        assert spec.impulse_probability == pytest.approx(0.01)
        assert spec.impulsive_variance == pytest.approx(10.0)

    def test_snr_and_sir(self):
        """Test that SNR and SIR come from the white and impulsive powers."""
        spec = GmmSpec(weights=(0.9, 0.1), variances=(0.01, 100.0))

        assert spec.snr_db(1.0) == pytest.approx(20.0)
        assert spec.sir_db(1.0) == pytest.approx(-20.0)

    def test_single_component_has_no_impulses(self):
        """Test a plain Gaussian mixture."""
        spec = GmmSpec(weights=(1.0,), variances=(0.5,))

        assert spec.impulsive_variance == 0.0
        assert spec.sir_db(1.0) == math.inf
        assert spec.is_degenerate()

    def test_weights_must_sum_to_one(self):
        """Test that unnormalized weights are rejected."""
        with pytest.raises(ValueError, match="sum to 1"):
            GmmSpec(weights=(0.5, 0.4), variances=(1.0, 2.0))

    def test_lengths_must_match(self):
        """Test that weights and variances pair up."""
        with pytest.raises(ValueError, match="differ in length"):
            GmmSpec(weights=(1.0,), variances=(1.0, 2.0))

    def test_variances_must_be_positive(self):
        """Test that zero variances are rejected."""
        with pytest.raises(ValueError, match="positive"):
            GmmSpec(weights=(0.5, 0.5), variances=(0.0, 1.0))

    def test_config_block_is_exact(self):
        """Test that the weights/variances block preserves every float."""
        spec = GmmSpec(weights=(0.9, 0.09, 0.01), variances=(0.0031622776601683794, 10.0, 1e3))

        restored = GmmSpec.from_config_block(spec.to_config_block())

        assert restored == spec

    def test_config_block_missing_key(self):
        """Test that a block without variances is rejected."""
        with pytest.raises(ValueError, match="variances"):
            GmmSpec.from_config_block("weights: [1.0]\n")

    def test_scaled(self):
        """Test scaling every variance."""
        spec = GmmSpec(weights=(0.5, 0.5), variances=(1.0, 3.0)).scaled(2.0)

        assert spec.variances == (2.0, 6.0)


class TestNoiseBatch:
    """Tests for NoiseBatch sequence."""

    def test_indexing(self):
        """Test that integer and slice indexing yield samples and batches."""
        batch = NoiseBatch(
            values=np.array([1 + 1j, 2 - 1j, 0.5j]), labels=np.array([0, 1, 0]), K=2
        )

        assert len(batch) == 3
        assert batch[1] == NoiseSample(value=2 - 1j, component=1)
        assert len(batch[1:]) == 2
        assert batch.component_counts() == (2, 1)
        assert [s.component for s in batch] == [0, 1, 0]

    def test_label_out_of_range(self):
        """Test that labels beyond K are rejected."""
        with pytest.raises(ValueError):
            NoiseBatch(values=np.zeros(2, dtype=complex), labels=np.array([0, 2]), K=2)


class TestSuppressorSpec:
    """Tests for SuppressorSpec dataclass."""

    def test_blanking(self):
        """Test a blanking suppressor."""
        spec = SuppressorSpec(kind="blanking", thresholds=(3.0,))

        assert spec.threshold == 3.0
        assert spec.bin_gains() == (1.0, 0.0)
        assert spec.is_active

    def test_infinite_threshold_is_inactive(self):
        """Test that an infinite threshold switches the suppressor off."""
        spec = SuppressorSpec(kind="blanking", thresholds=(math.inf,))

        assert not spec.is_active

    def test_thresholds_must_increase(self):
        """Test that clip-blank thresholds are ordered."""
        with pytest.raises(ValueError, match="increasing"):
            SuppressorSpec(kind="clip_blank", thresholds=(3.0, 2.0))

    def test_bas_gain_count(self):
        """Test that BAS needs one gain more than thresholds."""
        with pytest.raises(ValueError, match="gains"):
            SuppressorSpec(kind="multi_threshold_bas", thresholds=(1.0, 2.0), gains=(1.0, 0.5))

    def test_gains_in_unit_interval(self):
        """Test that gains above 1 are rejected."""
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            SuppressorSpec(kind="single_threshold_attenuation", thresholds=(1.0,), gains=(1.2, 0.1))

    def test_blanking_takes_no_gains(self):
        """Test that gains are refused on gain-free kinds."""
        with pytest.raises(ValueError, match="takes no gains"):
            SuppressorSpec(kind="blanking", thresholds=(1.0,), gains=(0.5,))


class TestDiscretePdf:
    """Tests for DiscretePdf dataclass."""

    @pytest.fixture
    def gaussian(self) -> DiscretePdf:
        """Unit-variance Gaussian on a symmetric grid."""
        grid = np.linspace(-10.0, 10.0, 2001)
        return DiscretePdf(grid=grid, values=np.exp(-(grid**2) / 2.0) / math.sqrt(2.0 * math.pi))

    def test_moments(self, gaussian):
        """Test mass, variance and symmetry."""
        assert gaussian.step == pytest.approx(0.01)
        assert gaussian.mass == pytest.approx(1.0, abs=1e-9)
        assert gaussian.variance == pytest.approx(1.0, abs=1e-6)
        assert gaussian.is_symmetric()

    def test_asymmetric(self, gaussian):
        """Test that a shifted density is refused at construction."""
        with pytest.raises(ValueError, match="symmetric"):
            DiscretePdf(grid=gaussian.grid, values=np.roll(gaussian.values, 5))

    def test_unnormalized(self, gaussian):
        """Test that a density with mass 2 is refused at construction."""
        with pytest.raises(ValueError, match="normalized"):
            DiscretePdf(grid=gaussian.grid, values=2.0 * gaussian.values)

    def test_negative_values(self, gaussian):
        """Test that negative density values are refused."""
        values = gaussian.values.copy()
        values[[0, -1]] = -1e-12

        with pytest.raises(ValueError, match="non-negative"):
            DiscretePdf(grid=gaussian.grid, values=values)

    def test_small_round_off_accepted(self, gaussian):
        """Test that mass and mirror errors inside the tolerances pass."""
        values = gaussian.values * (1.0 + 1e-6)
        values[0] *= 1.0 + 1e-9

        assert DiscretePdf(grid=gaussian.grid, values=values).mass == pytest.approx(1.0, abs=1e-5)

    def test_non_uniform_grid(self):
        """Test that non-uniform grids are rejected."""
        with pytest.raises(ValueError, match="uniform"):
            DiscretePdf(grid=np.array([0.0, 1.0, 3.0]), values=np.ones(3))

    def test_csv(self, gaussian, tmp_path):
        """Test writing and reading the two-column CSV."""
        path = gaussian.to_csv(tmp_path / "pdf.csv")

        text = path.read_text()
        restored = DiscretePdf.from_csv(path)

        assert text.startswith("#")
        assert "amplitude,density" in text
        assert np.array_equal(restored.grid, gaussian.grid)
        assert np.array_equal(restored.values, gaussian.values)

    def test_csv_bad_row(self, tmp_path):
        """Test that a three-column row is rejected."""
        path = tmp_path / "bad.csv"
        path.write_text("0.0,1.0\n1.0,2.0,3.0\n")

        with pytest.raises(ValueError, match="two columns"):
            DiscretePdf.from_csv(path)


class TestVarianceFunctionModel:
    """Tests for VarianceFunction dataclass."""

    @pytest.fixture
    def grid(self) -> np.ndarray:
        """Seven-point grid centered on 0."""
        return np.linspace(-3.0, 3.0, 7)

    def test_mirrored_values(self, grid):
        """Test that a mirrored estimate with undefined ends is accepted."""
        values = np.array([np.nan, 2.0, 1.5, 1.0, 1.5, 2.0, np.nan])

        vf = VarianceFunction(grid=grid, values=values)

        assert vf.defined.tolist() == [False, True, True, True, True, True, False]
        assert vf.at_index(0) is None
        assert vf.at_index(5) == pytest.approx(2.0)

    def test_one_sided_nan(self, grid):
        """Test that an undefined point without its mirror is refused."""
        values = np.array([np.nan, 2.0, 1.5, 1.0, 1.5, 2.0, 2.5])

        with pytest.raises(ValueError, match="mirrored points"):
            VarianceFunction(grid=grid, values=values)

    def test_asymmetric_values(self, grid):
        """Test that mirror values differing by 1% are refused."""
        values = np.array([2.5, 2.0, 1.5, 1.0, 1.5, 2.02, 2.5])

        with pytest.raises(ValueError, match="symmetric"):
            VarianceFunction(grid=grid, values=values)

    def test_non_positive_values(self, grid):
        """Test that zero local variances are refused."""
        with pytest.raises(ValueError, match="positive"):
            VarianceFunction(grid=grid, values=np.zeros(7))

    def test_shape_mismatch(self, grid):
        """Test that values must match the grid."""
        with pytest.raises(ValueError, match="equal length"):
            VarianceFunction(grid=grid, values=np.ones(5))


class TestChannelSpec:
    """Tests for ChannelSpec dataclass."""

    def test_exponential_profile(self):
        """Test the exponential power-delay profile."""
        spec = ChannelSpec.exponential("rayleigh_block", taps=8, decay=0.5)

        assert spec.taps == 8
        assert math.fsum(spec.tap_powers) == pytest.approx(1.0, abs=1e-15)
        assert spec.tap_powers[1] / spec.tap_powers[0] == pytest.approx(math.exp(-0.5))

    def test_flat(self):
        """Test the flat channel."""
        assert ChannelSpec.exponential("flat", taps=8, decay=0.5) == ChannelSpec.flat()

    def test_flat_single_tap(self):
        """Test that a flat channel rejects several taps."""
        with pytest.raises(ValueError, match="one tap"):
            ChannelSpec(kind="flat", tap_powers=(0.5, 0.5))


class TestSerQuery:
    """Tests for SerQuery dataclass."""

    def test_from_noise(self):
        """Test that gammas are relative to the signal power."""
        noise = GmmSpec(weights=(0.9, 0.1), variances=(0.02, 20.0))

        query = SerQuery.from_noise(noise, 2.0, M=4, L=64, alpha=0.9)

        assert query.gammas == pytest.approx((0.01, 10.0))
        assert query.K == 2
        assert query.alpha == 0.9

    def test_square_order(self):
        """Test that non-square orders are rejected."""
        with pytest.raises(ValueError, match="perfect square"):
            SerQuery(M=8, L=16, weights=(1.0,), gammas=(0.1,))


class TestSerEstimate:
    """Tests for SerEstimate dataclass."""

    def test_wilson_interval(self):
        """Test the 95% Wilson interval against its closed form."""
        estimate = SerEstimate(errors=50, tried=1000)
        z = 1.959963984540054
        p = 0.05
        denom = 1 + z * z / 1000
        expected_center = (p + z * z / 2000) / denom
        expected_half = z * math.sqrt(p * (1 - p) / 1000 + z * z / 4e6) / denom

        center, half = estimate.wilson_interval()

        assert estimate.ser == 0.05
        assert center == pytest.approx(expected_center, rel=1e-9)
        assert half == pytest.approx(expected_half, rel=1e-9)

    def test_zero_errors_has_positive_width(self):
        """Test that the interval stays open at zero errors."""
        assert SerEstimate(errors=0, tried=1000).half_width > 0.0

    def test_merged(self):
        """Test merging two chunks."""
        a = SerEstimate(errors=3, tried=100, dropped_blocks=1, component_counts=(90, 10))
        b = SerEstimate(errors=2, tried=200, component_counts=(195, 5))

        merged = a.merged(b)

        assert merged.errors == 5
        assert merged.tried == 300
        assert merged.dropped_blocks == 1
        assert merged.component_counts == (285, 15)

    def test_errors_bounded_by_tried(self):
        """Test that more errors than symbols is rejected."""
        with pytest.raises(ValueError):
            SerEstimate(errors=5, tried=4)


class TestSerCurve:
    """Tests for SerCurve dataclass."""

    def test_series_length(self):
        """Test that every series has one value per axis point."""
        with pytest.raises(ValueError, match="one value per axis point"):
            SerCurve(
                label="p1=0.01",
                axis_name="sir_db",
                axis_values=(0.0, 5.0),
                predictions={"kgmm": (0.1,)},
            )

    def test_probabilities(self):
        """Test that SER values outside [0, 1] are rejected."""
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            SerCurve(
                label="x", axis_name="sir_db", axis_values=(0.0,), predictions={"kgmm": (1.5,)}
            )


class TestSweepConfig:
    """Tests for the sweep configuration models."""

    @pytest.fixture
    def config(self) -> SweepConfig:
        """A Bernoulli-Gaussian sweep over p1."""
        return SweepConfig.model_validate(
            {
                "scenario": {"name": "bg"},
                "noise": {"model": "bernoulli_gaussian", "snr_db": 25.0},
                "axis": {"start": -40, "stop": 0, "step": 10},
                "curves": {"parameter": "noise.p1", "values": [0.001, 0.01]},
                "methods": {"analytic": ["awgn", "kgmm"]},
            }
        )

    def test_axis_values(self, config):
        """Test the inclusive axis grid."""
        assert config.axis.values() == (-40.0, -30.0, -20.0, -10.0, 0.0)

    def test_axis_fractional_step(self):
        """Test that a fractional step reaches the stop value."""
        axis = AxisConfig(start=0.0, stop=1.0, step=0.1)

        assert len(axis.values()) == 11
        assert axis.values()[-1] == 1.0

    def test_axis_empty_range(self):
        """Test that stop below start is rejected."""
        with pytest.raises(ValueError, match="empty"):
            AxisConfig(start=0.0, stop=-10.0, step=5.0)

    def test_curve_configs(self, config):
        """Test one labelled configuration per curve value."""
        curves = config.curve_configs()

        assert [label for label, _ in curves] == ["p1=0.001", "p1=0.01"]
        assert curves[1][1].noise.p1 == 0.01
        assert curves[1][1].noise.snr_db == 25.0

    def test_single_curve(self, config):
        """Test that a sweep without curves is one curve named after the scenario."""
        single = config.model_copy(update={"curves": None})

        assert [label for label, _ in single.curve_configs()] == ["bg"]

    def test_string_curve_label(self):
        """Test labels of string-valued curves."""
        curves = CurvesConfig(parameter="suppressor.kind", values=["genie_aided"])

        assert curves.label("genie_aided") == "kind=genie_aided"

    def test_unknown_curve_parameter(self):
        """Test that curves must name a known field."""
        with pytest.raises(ValueError, match="unknown curve parameter"):
            CurvesConfig(parameter="noise.colour", values=[1.0])

    def test_with_value_revalidates(self, config):
        """Test that replaced values go through validation."""
        with pytest.raises(ValueError):
            config.with_value("noise.p1", 1.5)

    def test_at_axis(self, config):
        """Test that the axis value lands in the noise table."""
        assert config.at_axis(-15.0).noise.sir_db == -15.0

    def test_config_hash_is_stable(self, config):
        """Test that equal configurations hash alike and changes show."""
        same = SweepConfig.model_validate(config.model_dump())

        assert config.config_hash() == same.config_hash()
        assert config.config_hash() != config.with_value("noise.snr_db", 20.0).config_hash()
        assert len(config.config_hash()) == 64

    def test_needs_a_method(self):
        """Test that a sweep with nothing to compute is rejected."""
        with pytest.raises(ValueError, match="at least one method"):
            SweepConfig.model_validate(
                {
                    "scenario": {"name": "empty"},
                    "axis": {"start": 0, "stop": 1, "step": 1},
                    "methods": {"analytic": [], "simulate": False},
                }
            )

    def test_unsupported_qam_order(self):
        """Test that 32-QAM is refused."""
        with pytest.raises(ValueError, match="qam_order"):
            SweepConfig.model_validate(
                {
                    "scenario": {"name": "x"},
                    "axis": {"start": 0, "stop": 1, "step": 1},
                    "ofdm": {"qam_order": 32},
                }
            )

    def test_optimize_needs_tunable_kind(self):
        """Test that optimize is refused for BAS."""
        with pytest.raises(ValueError, match="optimize"):
            SweepConfig.model_validate(
                {
                    "scenario": {"name": "x"},
                    "axis": {"start": 0, "stop": 1, "step": 1},
                    "suppressor": {"kind": "multi_threshold_bas", "optimize": True},
                }
            )

    def test_unknown_key(self):
        """Test that unknown keys are refused."""
        with pytest.raises(ValueError):
            SweepConfig.model_validate(
                {
                    "scenario": {"name": "x"},
                    "axis": {"start": 0, "stop": 1, "step": 1},
                    "noise": {"snr": 20},
                }
            )
