"""Two-donor exchange physics.

The 16-dim space is ``kron(donor_left, donor_right)`` with each donor in the
(electron, nucleus) order of :mod:`donorqc.spin`, so the full ordering is
(e1, n1, e2, n2). Exchange enters as ``J sigma^e1 . sigma^e2``: singlet at
-3J, triplets at +J.

``exchange_J`` takes the order-unity prefactor of the hydrogenic estimate as
exactly 1; treat its output as an order-of-magnitude number valid for
r >~ a_B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import EV_HZ, MU_B_HZ_PER_T
from .species import SI_P, DonorSpecies
from .spin import I2, PAULI, build_single_donor_hamiltonian, check_hermitian


EIGEN_RESOLUTION = 1e-12


class RegimeError(ValueError):
    """A perturbative formula was evaluated outside its stated regime."""


class StateIdentificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TwoDonorSystem:
    left: DonorSpecies = SI_P
    right: DonorSpecies = SI_P
    B: float = 2.0
    J: float = 0.0  # Hz
    valid: bool = field(init=False)

    def __post_init__(self):
        if self.J < 0:
            raise ValueError(f"exchange J must be >= 0, got {self.J}")
        if self.B < 0:
            raise ValueError(f"magnetic field must be >= 0, got {self.B}")
        object.__setattr__(self, "valid", 2 * self.J < MU_B_HZ_PER_T * self.B)

    def swapped(self) -> "TwoDonorSystem":
        return TwoDonorSystem(self.right, self.left, self.B, self.J)


def exchange_J(r: float, E_b: float = SI_P.E_b, a_B: float = SI_P.a_B):
    """J(r)/h in Hz for donor separation ``r`` (m); E_b in eV."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("donor separation must be positive")
    x = r / a_B
    out = E_b * EV_HZ * x**2.5 * np.exp(-2.0 * x)
    return float(out) if out.ndim == 0 else out


def exchange_peak_radius(a_B: float = SI_P.a_B) -> float:
    """Separation where J(r) is maximal (5 a_B / 4)."""
    return 1.25 * a_B


def spacing_for_exchange(J_target: float, E_b: float = SI_P.E_b, a_B: float = SI_P.a_B) -> float:
    """Separation r > 5a_B/4 at which J(r)/h equals ``J_target`` (Hz)."""
    r0 = exchange_peak_radius(a_B)
    if J_target <= 0 or J_target >= exchange_J(r0, E_b, a_B):
        raise ValueError("target exchange is outside the range of J(r) for r > 5a_B/4")
    hi = r0
    while exchange_J(hi, E_b, a_B) > J_target:
        hi *= 2
    return brentq(lambda r: exchange_J(r, E_b, a_B) - J_target, r0, hi, xtol=1e-16, rtol=1e-14)


def nu_J(A: float, B: float, J: float) -> float:
    """Electron-mediated nuclear exchange frequency (Hz), second order in A.

    Both electrons are assumed in |dn dn> and coupled with the same A.
    Requires 2J < mu_B B / h.
    """
    if A <= 0:
        raise ValueError("hyperfine A must be positive")
    zeeman = MU_B_HZ_PER_T * B
    if not 2 * J < zeeman:
        raise RegimeError(
            f"nu_J needs 2J < mu_B B/h; got 2J = {2 * J:.6g} Hz, mu_B B/h = {zeeman:.6g} Hz"
        )
    return 2 * A**2 * (1.0 / (zeeman - 2 * J) - 1.0 / zeeman)


def _electron_exchange_op() -> np.ndarray:
    out = np.zeros((16, 16), dtype=complex)
    for a in "xyz":
        e1 = np.kron(np.kron(PAULI[a], I2), np.eye(4))
        e2 = np.kron(np.eye(4), np.kron(PAULI[a], I2))
        out += e1 @ e2
    return out


EXCHANGE_OP = _electron_exchange_op()


def build_two_donor_hamiltonian(sys: TwoDonorSystem) -> np.ndarray:
    """16x16 H/h: two single-donor terms plus J sigma^e1 . sigma^e2."""
    H1 = build_single_donor_hamiltonian(sys.left, sys.B)
    H2 = build_single_donor_hamiltonian(sys.right, sys.B)
    I4 = np.eye(4)
    H = np.kron(H1, I4) + np.kron(I4, H2) + sys.J * EXCHANGE_OP
    check_hermitian(H)
    return H


def _basis_index(e1: int, n1: int, e2: int, n2: int) -> int:
    # 0 = up, 1 = down for each spin
    return ((e1 * 2 + n1) * 2 + e2) * 2 + n2


# |dn_e dn_e> x |up_n dn_n>, |dn_e dn_e> x |dn_n up_n>
TARGET_FLIPFLOP = (_basis_index(1, 0, 1, 1), _basis_index(1, 1, 1, 0))


def _pick_subspace(V: np.ndarray, ref: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    weights = np.sum(np.abs(ref.conj().T @ V) ** 2, axis=0)
    idx = np.sort(np.argsort(-weights, kind="stable")[:m])
    return idx, weights[idx]


def nu_J_exact(sys: TwoDonorSystem, steps: int = 16, min_overlap: float = 0.7) -> float:
    """Exact nuclear flip-flop splitting from the 16-level spectrum.

    The two eigenstates connected to |dn dn>_e x (|up dn>_n +/- |dn up>_n)
    are followed by maximum-overlap continuation from J = 0 and their
    energy difference is returned (Hz). Splittings below ``EIGEN_RESOLUTION``
    times the spectral radius are reported as 0.
    """
    zeeman = MU_B_HZ_PER_T * sys.B
    if not 2 * sys.J < zeeman:
        raise RegimeError(
            f"nu_J_exact needs 2J < mu_B B/h; got 2J = {2 * sys.J:.6g} Hz, "
            f"mu_B B/h = {zeeman:.6g} Hz"
        )
    ref = np.zeros((16, 2), dtype=complex)
    ref[TARGET_FLIPFLOP[0], 0] = 1.0
    ref[TARGET_FLIPFLOP[1], 1] = 1.0
    target = ref.copy()
    for J in np.linspace(0.0, sys.J, steps + 1 if sys.J > 0 else 1):
        H = build_two_donor_hamiltonian(TwoDonorSystem(sys.left, sys.right, sys.B, J))
        w, V = np.linalg.eigh(H)
        idx, _ = _pick_subspace(V, ref, 2)
        ref = V[:, idx]
    weights = np.sum(np.abs(target.conj().T @ ref) ** 2, axis=0)
    if np.any(weights < min_overlap):
        raise StateIdentificationError(
            f"flip-flop states are ambiguous: overlaps {np.round(weights, 3).tolist()} "
            f"with the |dn dn>_e nuclear flip-flop subspace (need >= {min_overlap})"
        )
    split = float(abs(w[idx[1]] - w[idx[0]]))
    # below this the splitting is eigensolver roundoff, not physics
    floor = EIGEN_RESOLUTION * float(np.max(np.abs(w)))
    return split if split > floor else 0.0
