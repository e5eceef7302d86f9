"""Analytic SER predictors."""

from .ser_analytic import (
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

__all__ = [
    "collapse_to_two",
    "output_snr",
    "q_function",
    "ser_2gmm",
    "ser_awgn_mqam",
    "ser_craig_awgn",
    "ser_kgmm",
    "ser_rayleigh",
    "ser_rician_kgmm",
    "ser_rician_w",
]
