# noise/__init__.py

from .wiener import NoiseRealization, sample_noise, noise_modes, noise_amplitudes, noise_trace, noise_exponent
from .stokes import ZProcess, ou_rate, ou_variance, simulate_ou_modes, solve_stokes_z, truncate_z
from .multiplicative import UpsilonPaths, brownian_path, extend_path, upsilon_paths, upsilon_bounds
from .stopping import StoppingTime, stopping_time_additive, stopping_time_mult, additive_threshold
from .montecarlo import SurvivalRow, SurvivalTable, survival_probability

__all__ = [
    "NoiseRealization",
    "sample_noise",
    "noise_modes",
    "noise_amplitudes",
    "noise_trace",
    "noise_exponent",
    "ZProcess",
    "ou_rate",
    "ou_variance",
    "simulate_ou_modes",
    "solve_stokes_z",
    "truncate_z",
    "UpsilonPaths",
    "brownian_path",
    "extend_path",
    "upsilon_paths",
    "upsilon_bounds",
    "StoppingTime",
    "stopping_time_additive",
    "stopping_time_mult",
    "additive_threshold",
    "SurvivalRow",
    "SurvivalTable",
    "survival_probability",
]
