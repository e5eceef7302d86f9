"""
Configuration management for impulse-ser.

This module loads environment variables and defines the numerical defaults
used throughout the package: grid sizes for the distortion pdf, fitter
tolerances, SER pruning floors, simulator geometry and the Rician
approximation constants.
"""

import logging
import math
import os

from dotenv import load_dotenv

from .errors import UnsupportedModulationError

# Load environment variables from .env file
load_dotenv()

# Configure logging
logging.basicConfig(
    level=os.getenv("IMPULSE_SER_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


class Config:
    """
    Central configuration class for impulse-ser.

    Loads overridable numerical settings from environment variables and
    provides constant tables for modulation-dependent parameters.
    """

    # =============================================================================
    # Environment Variables (from .env)
    # =============================================================================

    LOG_LEVEL: str = os.getenv("IMPULSE_SER_LOG_LEVEL", "INFO").upper()

    # Distortion pdf grid (points per side, half-width in sigma_y units)
    DISTORTION_GRID_POINTS: int = int(os.getenv("DISTORTION_GRID_POINTS", "5000"))
    DISTORTION_GRID_SPAN: float = float(os.getenv("DISTORTION_GRID_SPAN", "10"))
    DISTORTION_CONVOLUTION: str = os.getenv("DISTORTION_CONVOLUTION", "direct").lower()

    # SER predictors
    RICIAN_RIEMANN_POINTS: int = int(os.getenv("RICIAN_RIEMANN_POINTS", "11"))
    SER_PRUNING_FLOOR: float = float(os.getenv("SER_PRUNING_FLOOR", "1e-20"))
    SER_WEIGHT_FLOOR: float = float(os.getenv("SER_WEIGHT_FLOOR", "1e-18"))

    # Component-by-component fitter
    FIT_KNEE_FACTOR: float = float(os.getenv("FIT_KNEE_FACTOR", "0.9"))
    FIT_PDF_TOLERANCE: float = float(os.getenv("FIT_PDF_TOLERANCE", "1e-15"))
    FIT_VARIANCE_TOLERANCE: float = float(os.getenv("FIT_VARIANCE_TOLERANCE", "0.05"))

    # Noise models
    CLASS_A_COMPONENTS: int = int(os.getenv("CLASS_A_COMPONENTS", "10"))

    # Suppressor design
    BAS_THRESHOLD_COUNT: int = int(os.getenv("BAS_THRESHOLD_COUNT", "10"))
    BAS_THRESHOLD_SPAN: float = float(os.getenv("BAS_THRESHOLD_SPAN", "5"))
    THRESHOLD_GRID_POINTS: int = int(os.getenv("THRESHOLD_GRID_POINTS", "200"))
    THRESHOLD_GRID_SPAN: float = float(os.getenv("THRESHOLD_GRID_SPAN", "6"))

    # OFDM link simulator
    OFDM_SUBCARRIERS: int = int(os.getenv("OFDM_SUBCARRIERS", "256"))
    CHANNEL_TAPS: int = int(os.getenv("CHANNEL_TAPS", "8"))
    CHANNEL_DECAY: float = float(os.getenv("CHANNEL_DECAY", "0.5"))
    ZF_GAIN_FLOOR: float = float(os.getenv("ZF_GAIN_FLOOR", "1e-12"))
    SIM_BLOCKS_PER_CHUNK: int = int(os.getenv("SIM_BLOCKS_PER_CHUNK", "64"))
    SIM_THREADS: int = int(os.getenv("SIM_THREADS", "1"))
    CONFIDENCE_LEVEL: float = float(os.getenv("CONFIDENCE_LEVEL", "0.95"))

    # =============================================================================
    # Modulation Tables
    # =============================================================================

    SUPPORTED_QAM_ORDERS = (4, 16, 64)

    # Rice-W approximation constants (a, b, c) per QAM order
    RICIAN_CONSTANTS = {
        4: (1.0, 1.0, math.sin(math.pi / 4)),
        16: (0.75, 2.25, math.sqrt(0.1)),
    }

    # =============================================================================
    # Suppressor Kinds
    # =============================================================================

    SUPPRESSOR_KINDS = (
        "none",
        "blanking",
        "clipping",
        "clip_blank",
        "single_threshold_attenuation",
        "multi_threshold_bas",
        "genie_aided",
    )

    # Kinds whose threshold can be tuned by grid search
    OPTIMIZABLE_KINDS = ("blanking", "clipping", "single_threshold_attenuation")

    # Kinds with a four-region distortion pdf
    DISTORTION_PDF_KINDS = ("none", "blanking", "single_threshold_attenuation")

    # =============================================================================
    # Validation
    # =============================================================================

    @classmethod
    def validate(cls) -> None:
        """
        Validate that numerical settings are in range.

        Raises:
            ValueError: If any setting is out of range.
        """
        problems = []
        if cls.DISTORTION_GRID_POINTS < 16:
            problems.append("DISTORTION_GRID_POINTS must be at least 16")
        if cls.DISTORTION_GRID_SPAN <= 0:
            problems.append("DISTORTION_GRID_SPAN must be positive")
        if cls.DISTORTION_CONVOLUTION not in ("direct", "fft"):
            problems.append("DISTORTION_CONVOLUTION must be 'direct' or 'fft'")
        if cls.RICIAN_RIEMANN_POINTS < 1:
            problems.append("RICIAN_RIEMANN_POINTS must be at least 1")
        if not 0 < cls.FIT_KNEE_FACTOR < 1:
            problems.append("FIT_KNEE_FACTOR must lie in (0, 1)")
        if not 0 < cls.FIT_VARIANCE_TOLERANCE < 1:
            problems.append("FIT_VARIANCE_TOLERANCE must lie in (0, 1)")
        if cls.CLASS_A_COMPONENTS < 2:
            problems.append("CLASS_A_COMPONENTS must be at least 2")
        if cls.THRESHOLD_GRID_POINTS < 3:
            problems.append("THRESHOLD_GRID_POINTS must be at least 3")
        if cls.SIM_BLOCKS_PER_CHUNK < 1 or cls.SIM_THREADS < 1:
            problems.append("SIM_BLOCKS_PER_CHUNK and SIM_THREADS must be positive")
        if not 0 < cls.CONFIDENCE_LEVEL < 1:
            problems.append("CONFIDENCE_LEVEL must lie in (0, 1)")

        if problems:
            raise ValueError(
                f"Invalid configuration: {'; '.join(problems)}\n"
                f"Please fix these in your .env file or environment."
            )

        logger.debug("Configuration validated successfully")

    @classmethod
    def rician_constants(cls, M: int) -> tuple[float, float, float]:
        """
        Get the Rice-W constants (a, b, c) for a QAM order.

        Raises:
            UnsupportedModulationError: If no constants exist for M.
        """
        if M not in cls.RICIAN_CONSTANTS:
            raise UnsupportedModulationError(
                f"No Rician approximation constants for {M}-QAM. "
                f"Supported: {sorted(cls.RICIAN_CONSTANTS)}"
            )
        return cls.RICIAN_CONSTANTS[M]

    @classmethod
    def threshold_grid(cls, sigma_y: float, points: int | None = None) -> list[float]:
        """Equispaced threshold candidates over (0, span * sigma_y]."""
        n = points or cls.THRESHOLD_GRID_POINTS
        top = cls.THRESHOLD_GRID_SPAN * sigma_y
        return [top * (i + 1) / n for i in range(n)]


# Validate configuration on import
try:
    Config.validate()
except ValueError as e:
    logger.warning(f"Configuration validation failed: {e}")
    logger.warning("Falling back on values as given; results may be unreliable")
