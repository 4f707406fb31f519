"""Simulation toolkit for donor electron-nuclear spin qubits in silicon."""

from .constants import CONST, PhysicalConstants
from .species import SI_P, SI_P_STRAINED, ConfigError, DonorSpecies, load_species
from .spin import (
    Spectrum,
    build_single_donor_hamiltonian,
    donor_spectrum,
    eigensystem,
    energy_differences,
    transition_moment,
)

__all__ = [
    "CONST",
    "PhysicalConstants",
    "SI_P",
    "SI_P_STRAINED",
    "ConfigError",
    "DonorSpecies",
    "load_species",
    "Spectrum",
    "build_single_donor_hamiltonian",
    "donor_spectrum",
    "eigensystem",
    "energy_differences",
    "transition_moment",
]
