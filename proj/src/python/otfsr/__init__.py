"""Delay-Doppler estimation core (C++ extension wrappers)."""

from otfsr._core import (
    acceptance,
    detect,
    export_ambiguity_maps,
    fine_ambiguity,
    fractional_estimate,
    model_patch,
    montecarlo,
    numeric_spectrum_autocorr,
    parse_config,
    pulse_matched_autocorr,
    sweep,
    window_autocorr_rrc,
)

__all__ = [
    "acceptance",
    "detect",
    "export_ambiguity_maps",
    "fine_ambiguity",
    "fractional_estimate",
    "model_patch",
    "montecarlo",
    "numeric_spectrum_autocorr",
    "parse_config",
    "pulse_matched_autocorr",
    "sweep",
    "window_autocorr_rrc",
]
