"""Time-ordered propagation of small spin systems under an RF drive.

Two frames are available:

``"lab"``
    The full Hamiltonian ``H0 + b(t) cos(2 pi f t + phi(t)) M + c(t) X`` is
    stepped with the exponential midpoint rule. Requires at least 20 pulse
    samples per carrier period.
``"rwa"``
    Interaction picture with respect to ``H0``. In the eigenbasis of ``H0``
    every drive matrix element oscillates at ``E_k - E_l +/- f``; terms whose
    frequency exceeds ``cutoff * f`` are dropped. The returned propagator is
    transformed back so both frames are directly comparable. Unless
    ``substeps`` is given, the step is halved until the propagator changes by
    less than ``step_tol`` in operator norm.

All Hamiltonians are in Hz (E/h); ``b(t) = mu_B amp(t) / h`` multiplies the
moment operator ``M`` given in units of mu_B.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import warnings

import numpy as np

from ..constants import MU_B_HZ_PER_T
from ..spin import check_hermitian
from .pulses import PulseShape

UNITARITY_TOL = 1e-10
MIN_SAMPLES_PER_PERIOD = 20
STEP_TOL = 1e-8
MAX_STEPS = 1 << 22


class ResolutionError(ValueError):
    """Pulse sampling cannot resolve the lab-frame carrier."""


@dataclass(frozen=True)
class DrivenSystem:
    """Static Hamiltonian, drive coupling and an optional scheduled extra term.

    ``extra_op`` is multiplied by ``extra_profile(t)`` (Hz), e.g. an exchange
    operator with a trapezoidal J(t) ramp.
    """

    h0: np.ndarray
    moment: np.ndarray
    extra_op: np.ndarray | None = None
    extra_profile: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        check_hermitian(self.h0)
        check_hermitian(self.moment)
        if (self.extra_op is None) != (self.extra_profile is None):
            raise ValueError("extra_op and extra_profile must be given together")

    @property
    def dim(self) -> int:
        return self.h0.shape[0]


@dataclass(frozen=True)
class Propagator:
    unitary: np.ndarray
    frame: str
    substeps: int
    steps: int
    step_change: float | None = None  # ||U(h) - U(2h)|| of the last refinement

    def unitarity_error(self) -> float:
        return unitarity_error(self.unitary)


def unitarity_error(U: np.ndarray) -> float:
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), 2))


def trapezoid_profile(peak: float, t_total: float, t_ramp: float) -> Callable:
    """Coefficient rising linearly to ``peak`` over ``t_ramp``, flat, then falling."""
    if not 0 <= 2 * t_ramp <= t_total:
        raise ValueError("ramp time must satisfy 0 <= 2 t_ramp <= t_total")

    def profile(t):
        t = np.asarray(t, dtype=float)
        if t_ramp == 0:
            return np.where((t >= 0) & (t <= t_total), peak, 0.0)
        up = np.clip(t / t_ramp, 0, 1)
        down = np.clip((t_total - t) / t_ramp, 0, 1)
        return peak * np.minimum(up, down)

    return profile


def _expm_herm_stack(Hs: np.ndarray, dt: float) -> np.ndarray:
    """exp(-2 pi i H dt) for a stack of Hermitian matrices."""
    w, V = np.linalg.eigh(Hs)
    phase = np.exp(-2j * np.pi * w * dt)
    return (V * phase[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def _ordered_product(Us: np.ndarray) -> np.ndarray:
    """U[n-1] @ ... @ U[1] @ U[0] by pairwise reduction."""
    Us = np.asarray(Us)
    while len(Us) > 1:
        if len(Us) % 2:
            tail = Us[-1:]
            Us = Us[:-1]
        else:
            tail = None
        Us = Us[1::2] @ Us[0::2]
        if tail is not None:
            Us = np.concatenate([Us, tail])
    return Us[0]


def _nearest_unitary(U: np.ndarray) -> np.ndarray:
    """Polar projection; removes roundoff drift accumulated over long products."""
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh


def _sample_times(pulse: PulseShape, substeps: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Midpoint times of each sub-step and the sample index they belong to."""
    h = pulse.dt / substeps
    k = np.arange(pulse.n * substeps)
    return (k + 0.5) * h, k // substeps, h


def evolve(system: DrivenSystem, pulse: PulseShape, frame: str = "rwa",
           substeps: int | None = None, cutoff: float = 0.5,
           steps_per_cycle: int = 64, chunk: int = 4096,
           step_tol: float = STEP_TOL) -> Propagator:
    """Propagator of ``system`` driven by ``pulse`` (original basis).

    Raises ``ArithmeticError`` if the result misses the unitarity budget.
    """
    if frame == "lab":
        prop = _evolve_lab(system, pulse, substeps, chunk)
    elif frame == "rwa" and substeps is not None:
        prop = _evolve_rwa(system, pulse, substeps, cutoff, steps_per_cycle, chunk)
    elif frame == "rwa":
        prop = _evolve_rwa(system, pulse, None, cutoff, steps_per_cycle, chunk)
        while True:
            finer = _evolve_rwa(system, pulse, 2 * prop.substeps, cutoff, steps_per_cycle, chunk)
            change = float(np.linalg.norm(finer.unitary - prop.unitary, 2))
            prop = Propagator(finer.unitary, "rwa", finer.substeps, finer.steps, change)
            if change < step_tol:
                break
            if 2 * finer.steps > MAX_STEPS:
                warnings.warn(f"rotating-frame step refinement stopped at {finer.steps} steps "
                              f"with change {change:.3g} > {step_tol:g}", stacklevel=2)
                break
    else:
        raise ValueError(f"unknown frame {frame!r}; use 'lab' or 'rwa'")
    err = prop.unitarity_error()
    if err >= UNITARITY_TOL:
        raise ArithmeticError(f"propagator unitarity error {err:.3g} exceeds {UNITARITY_TOL:g}")
    return prop


def _evolve_lab(system, pulse, substeps, chunk):
    if pulse.carrier > 0 and pulse.dt * pulse.carrier * MIN_SAMPLES_PER_PERIOD > 1 + 1e-12:
        need = 1.0 / (MIN_SAMPLES_PER_PERIOD * pulse.carrier)
        raise ResolutionError(
            f"lab-frame evolution needs dt <= {need:.6g} s for a {pulse.carrier:.6g} Hz "
            f"carrier (got {pulse.dt:.6g} s); resample the pulse or use frame='rwa'"
        )
    if substeps is None:
        substeps = 4
    t, idx, h = _sample_times(pulse, substeps)
    b = MU_B_HZ_PER_T * pulse.amplitudes[idx] * np.cos(2 * np.pi * pulse.carrier * t + pulse.phases[idx])
    extra = None if system.extra_profile is None else np.asarray(system.extra_profile(t), dtype=float)
    parts = []
    for s in range(0, len(t), chunk):
        sl = slice(s, s + chunk)
        Hs = system.h0[None] + b[sl, None, None] * system.moment[None]
        if extra is not None:
            Hs = Hs + extra[sl, None, None] * system.extra_op[None]
        parts.append(_nearest_unitary(_ordered_product(_expm_herm_stack(Hs, h))))
    U = _ordered_product(np.array(parts)) if parts else np.eye(system.dim, dtype=complex)
    return Propagator(U, "lab", substeps, len(t))


def _drop_roundoff(A: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    scale = np.abs(A).max(initial=0.0)
    return np.where(np.abs(A) > rtol * scale, A, 0)


def _evolve_rwa(system, pulse, substeps, cutoff, steps_per_cycle, chunk):
    E, V = np.linalg.eigh(system.h0)
    Vh = V.conj().T
    M = _drop_roundoff(Vh @ system.moment @ V)
    W = E[:, None] - E[None, :]
    f = pulse.carrier
    if f > 0:
        keep_p = np.abs(W + f) < cutoff * f
        keep_m = np.abs(W - f) < cutoff * f
    else:
        # no carrier: plain interaction picture, nothing is dropped
        keep_p = keep_m = np.ones_like(W, dtype=bool)
    Mp = np.where(keep_p, M, 0)
    Mm = np.where(keep_m, M, 0)
    freqs = [np.abs(W + f)[keep_p & (Mp != 0)], np.abs(W - f)[keep_m & (Mm != 0)]]
    X = None
    if system.extra_op is not None:
        X = _drop_roundoff(Vh @ system.extra_op @ V)
        keep_x = np.abs(W) < cutoff * f if f > 0 else np.ones_like(W, dtype=bool)
        X = np.where(keep_x, X, 0)
        freqs.append(np.abs(W)[keep_x & (X != 0)])
    fmax = max((float(a.max()) for a in freqs if a.size), default=0.0)
    if substeps is None:
        substeps = max(1, int(np.ceil(fmax * pulse.dt * steps_per_cycle)))
    t, idx, h = _sample_times(pulse, substeps)
    b = 0.5 * MU_B_HZ_PER_T * pulse.amplitudes[idx]
    ph = pulse.phases[idx]
    extra = None if X is None else np.asarray(system.extra_profile(t), dtype=float)
    parts = []
    for s in range(0, len(t), chunk):
        sl = slice(s, s + chunk)
        ts = t[sl][:, None, None]
        rot_p = np.exp(1j * (2 * np.pi * (W + f)[None] * ts + ph[sl, None, None]))
        rot_m = np.exp(1j * (2 * np.pi * (W - f)[None] * ts - ph[sl, None, None]))
        Hs = b[sl, None, None] * (Mp[None] * rot_p + Mm[None] * rot_m)
        if extra is not None:
            Hs = Hs + extra[sl, None, None] * X[None] * np.exp(2j * np.pi * W[None] * ts)
        parts.append(_nearest_unitary(_ordered_product(_expm_herm_stack(Hs, h))))
    UI = _ordered_product(np.array(parts)) if parts else np.eye(system.dim, dtype=complex)
    U0 = np.exp(-2j * np.pi * E * pulse.duration)
    U = V @ (U0[:, None] * UI) @ Vh
    return Propagator(U, "rwa", substeps, len(t))
