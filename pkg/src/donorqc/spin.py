"""Single-donor electron-nuclear spin Hamiltonian and its spectrum.

All energies are stored as frequencies (E/h, Hz). Pauli matrices carry
eigenvalues +/-1. The 4-dim product basis is ordered

    |up_e up_n>, |up_e dn_n>, |dn_e up_n>, |dn_e dn_n>

i.e. ``np.kron(electron, nucleus)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MU_B, MU_B_HZ_PER_T, MU_N, MU_N_HZ_PER_T
from .species import DonorSpecies

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
PAULI = {"x": SX, "y": SY, "z": SZ}

PRODUCT_LABELS = ("uu", "ud", "du", "dd")  # (electron, nucleus)

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
TRIPLET_0 = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)

HERMITIAN_RTOL = 1e-12


class NotHermitianError(ValueError):
    pass


def electron_op(axis: str) -> np.ndarray:
    return np.kron(PAULI[axis], I2)


def nuclear_op(axis: str) -> np.ndarray:
    return np.kron(I2, PAULI[axis])


def hyperfine_op() -> np.ndarray:
    """sigma_e . sigma_n on the 4-dim space."""
    return sum(np.kron(PAULI[a], PAULI[a]) for a in "xyz")


def nuclear_moment_ratio(species: DonorSpecies) -> float:
    """g_n mu_n / mu_B."""
    return species.g_n * MU_N / MU_B


def moment_op(species: DonorSpecies, axis="x") -> np.ndarray:
    """Magnetic-moment operator along ``axis`` in units of mu_B.

    ``axis`` is ``"x"``, ``"y"``, ``"z"`` or a 3-vector (normalised here).
    """
    r = nuclear_moment_ratio(species)
    if isinstance(axis, str):
        return electron_op(axis) - r * nuclear_op(axis)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    return sum(c * (electron_op(a) - r * nuclear_op(a)) for c, a in zip(n, "xyz"))


def build_single_donor_hamiltonian(species: DonorSpecies, B: float) -> np.ndarray:
    """H/h (Hz) of one donor: electron and nuclear Zeeman plus contact hyperfine."""
    if B < 0:
        raise ValueError(f"magnetic field must be >= 0, got {B}")
    w_e = MU_B_HZ_PER_T * B
    w_n = species.g_n * MU_N_HZ_PER_T * B
    return w_e * electron_op("z") - w_n * nuclear_op("z") + species.A_eff * hyperfine_op()


def check_hermitian(H: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {H.shape}")
    scale = max(np.linalg.norm(H), 1.0)
    dev = np.linalg.norm(H - H.conj().T)
    if dev > rtol * scale:
        raise NotHermitianError(f"matrix is not Hermitian: ||H - H^+|| = {dev:.3e}")


@dataclass(frozen=True)
class Spectrum:
    levels: np.ndarray  # ascending, Hz
    states: np.ndarray  # columns are eigenvectors
    labels: tuple[str, ...] = ()

    def __len__(self):
        return len(self.levels)

    def vector(self, i: int) -> np.ndarray:
        return self.states[:, i]


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    k = int(np.argmax(mags > mags.max() * (1 - 1e-9)))  # first of the near-largest
    return v * (np.conj(v[k]) / mags[k])


def _canonical_block(vecs: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis for the span of ``vecs``.

    Canonical basis vectors are projected into the subspace and
    Gram-Schmidt orthogonalised, strongest projection first (ties go to the
    lower index); the result is ordered by seed index.
    """
    dim, m = vecs.shape
    proj = vecs @ vecs.conj().T
    chosen: list[tuple[int, np.ndarray]] = []
    remaining = list(range(dim))
    basis = np.zeros((dim, 0), dtype=complex)
    while len(chosen) < m:
        best, best_norm, best_vec = None, -1.0, None
        for k in remaining:
            w = proj[:, k].copy()
            if basis.shape[1]:
                w -= basis @ (basis.conj().T @ w)
            nrm = np.linalg.norm(w)
            if nrm > best_norm + 1e-12:
                best, best_norm, best_vec = k, nrm, w
        remaining.remove(best)
        v = best_vec / best_norm
        basis = np.column_stack([basis, v])
        chosen.append((best, v))
    chosen.sort(key=lambda item: item[0])
    return np.column_stack([v for _, v in chosen])


def eigensystem(H: np.ndarray, degeneracy_tol: float = 1e-10) -> Spectrum:
    """Diagonalise a Hermitian matrix with reproducible eigenvectors.

    Degenerate subspaces (relative gap below ``degeneracy_tol``) get a basis
    from :func:`_canonical_block`; every vector is then phased so that its
    largest-magnitude component is real and positive.
    """
    H = np.asarray(H, dtype=complex)
    check_hermitian(H)
    Hs = 0.5 * (H + H.conj().T)
    w, V = np.linalg.eigh(Hs)
    scale = max(np.abs(w).max(initial=0.0), 1e-300)
    out = V.copy()
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[start] <= degeneracy_tol * scale:
            stop += 1
        if stop - start > 1:
            # exact-degeneracy case: make the degenerate levels bit-identical
            w[start:stop] = w[start:stop].mean()
            out[:, start:stop] = _canonical_block(V[:, start:stop])
        start = stop
    out = np.column_stack([_fix_phase(out[:, k]) for k in range(n)])
    return Spectrum(levels=w, states=out)


def label_states(states: np.ndarray) -> tuple[str, ...]:
    """Adiabatic labels for 4-dim single-donor eigenvectors."""
    labels = []
    for k in range(states.shape[1]):
        p = np.abs(states[:, k]) ** 2
        j = int(np.argmax(p))
        if p[j] >= 0.9:
            labels.append(PRODUCT_LABELS[j])
        else:
            s = abs(np.vdot(SINGLET, states[:, k])) ** 2
            t = abs(np.vdot(TRIPLET_0, states[:, k])) ** 2
            labels.append("S-like" if s >= t else "T0-like")
    return tuple(labels)


def donor_spectrum(species: DonorSpecies, B: float) -> Spectrum:
    spec = eigensystem(build_single_donor_hamiltonian(species, B))
    return Spectrum(spec.levels, spec.states, label_states(spec.states))


def transition_moment(species: DonorSpecies, B: float, i: int, j: int, axis="x") -> float:
    """|<i| sigma^e - (g_n mu_n/mu_B) sigma^n |j>| between eigenstates, in mu_B."""
    if i == j:
        raise ValueError("transition_moment needs two distinct levels")
    spec = donor_spectrum(species, B)
    n = len(spec)
    for k in (i, j):
        if not -n <= k < n:
            raise IndexError(f"level index {k} out of range for {n} levels")
    M = moment_op(species, axis)
    return float(abs(spec.vector(i).conj() @ M @ spec.vector(j)))


def moment_matrix(species: DonorSpecies, B: float, axis="x") -> np.ndarray:
    """All |<i|M|j>| between eigenstates at field B (4x4, real)."""
    spec = donor_spectrum(species, B)
    M = moment_op(species, axis)
    return np.abs(spec.states.conj().T @ M @ spec.states)


def energy_differences(species: DonorSpecies, B_grid) -> np.ndarray:
    """Sorted pairwise level gaps (Hz), one row of 6 per field value."""
    B_grid = np.atleast_1d(np.asarray(B_grid, dtype=float))
    if B_grid.size == 0:
        raise ValueError("field grid is empty")
    if np.any(np.diff(B_grid) < 0):
        raise ValueError("field grid must be nondecreasing")
    rows = []
    iu = np.triu_indices(4, k=1)
    for B in B_grid:
        lv = donor_spectrum(species, B).levels
        rows.append(np.sort((lv[None, :] - lv[:, None])[iu]))
    return np.array(rows)


def levels_table(species: DonorSpecies, B_grid) -> list[tuple[float, int, float, str]]:
    """Rows ``(B_tesla, level_index, freq_hz, label)`` for CSV export."""
    rows = []
    for B in np.atleast_1d(np.asarray(B_grid, dtype=float)):
        spec = donor_spectrum(species, B)
        for k, (lv, lab) in enumerate(zip(spec.levels, spec.labels)):
            rows.append((float(B), k, float(lv), lab))
    return rows


def find_level(spec: Spectrum, product_index: int) -> int:
    """Index of the eigenstate with the largest weight on a product state."""
    return int(np.argmax(np.abs(spec.states[product_index, :]) ** 2))
