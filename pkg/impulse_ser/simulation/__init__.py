"""Monte Carlo OFDM link simulator."""

from .ofdm_sim import blocks_for_budget, demodulate, modulate, realize_channel, run_campaign

__all__ = ["blocks_for_budget", "demodulate", "modulate", "realize_channel", "run_campaign"]
