"""CODATA constants used throughout the package (SI units)."""

from __future__ import annotations

from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    mu_B: float = _sc.physical_constants["Bohr magneton"][0]
    mu_n: float = _sc.physical_constants["nuclear magneton"][0]
    k_B: float = _sc.k
    h: float = _sc.h
    hbar: float = _sc.hbar
    e: float = _sc.e
    m_e: float = _sc.m_e

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"constant {name} must be positive, got {value}")


CONST = PhysicalConstants()

MU_B = CONST.mu_B
MU_N = CONST.mu_n
K_B = CONST.k_B
H = CONST.h
HBAR = CONST.hbar
E_CHARGE = CONST.e
M_E = CONST.m_e

# Zeeman coefficients as frequencies (Hz per tesla)
MU_B_HZ_PER_T = MU_B / H
MU_N_HZ_PER_T = MU_N / H
EV_HZ = E_CHARGE / H
