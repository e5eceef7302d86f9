"""Nonlinear suppressors, their distortion pdfs and mixture fits."""

from .distortion_pdf import (
    conditional_pdf_above,
    conditional_signal_pdf_below,
    distortion_component_pdfs,
    fit_white_component,
    make_grid,
    region_weights,
    to_target,
)
from .gmm_fitter import fit_gmm, mixture_pdf, reference_mixture, variance_function
from .suppressors import (
    adapt_to_signal_power,
    apply,
    bussgang_alpha,
    component_distortion_powers,
    make_attenuation,
    make_bas,
    make_blanking,
    make_clip_blank,
    make_clipping,
    make_genie_aided,
    optimize_threshold,
    output_snr,
    posterior_gains,
)

__all__ = [
    # Suppressors
    "adapt_to_signal_power",
    "apply",
    "bussgang_alpha",
    "component_distortion_powers",
    "make_attenuation",
    "make_bas",
    "make_blanking",
    "make_clip_blank",
    "make_clipping",
    "make_genie_aided",
    "optimize_threshold",
    "output_snr",
    "posterior_gains",
    # Distortion pdfs
    "conditional_pdf_above",
    "conditional_signal_pdf_below",
    "distortion_component_pdfs",
    "fit_white_component",
    "make_grid",
    "region_weights",
    "to_target",
    # Mixture fitting
    "fit_gmm",
    "mixture_pdf",
    "reference_mixture",
    "variance_function",
]
