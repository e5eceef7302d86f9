"""Impulsive-noise mixture models."""

from .gmm_noise import (
    approximate_sas,
    make_bernoulli_gaussian,
    make_class_a,
    make_sas_noise,
    pdf,
    sample,
    sas_pdf,
)

__all__ = [
    "approximate_sas",
    "make_bernoulli_gaussian",
    "make_class_a",
    "make_sas_noise",
    "pdf",
    "sample",
    "sas_pdf",
]
