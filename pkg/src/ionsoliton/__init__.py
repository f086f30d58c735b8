"""Solitary waves of the Euler-Poisson system in the stretched frame and their KdV limit."""
from .model import (
    AdmissibilityVerdict,
    CriticalDensities,
    ModelParams,
    check_admissible,
    solve_critical_densities,
    solve_zeta,
)
from .dynamics import WaveProfile, integrate_half_profile, mirror_to_full_line, solve_wave
from .kdv import KdvReference, compute_remainders, n_kdv

__all__ = [
    "AdmissibilityVerdict", "CriticalDensities", "ModelParams", "check_admissible",
    "solve_critical_densities", "solve_zeta", "WaveProfile", "integrate_half_profile",
    "mirror_to_full_line", "solve_wave", "KdvReference", "compute_remainders", "n_kdv",
]
