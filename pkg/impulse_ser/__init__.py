"""
impulse-ser: SER prediction for M-QAM OFDM under Gaussian-mixture impulsive noise.

Layers:
- noise: impulsive-noise mixtures and their samples
- mitigation: suppressors, distortion pdfs and component-by-component fits
- analysis: closed-form and multinomial SER predictors
- simulation: Monte Carlo OFDM link simulator
- sweep, reporting, cli: scenario-driven sweeps and their CSV output
"""

__version__ = "0.1.0"
