"""Two-level pulse error at a resonance offset and a worst-case pulse optimiser.

In the rotating frame a sample of Rabi frequency ``nu`` and phase ``phi``
at detuning ``delta`` evolves under ``(delta/2) Z + (nu/2)(cos phi X + sin phi Y)``
(Hz). Each step is an exact SU(2) exponential, kept as a unit quaternion
``(w, x, y, z)`` meaning ``w I - i (x X + y Y + z Z)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..constants import MU_B_HZ_PER_T
from .pulses import PulseShape, corpse, tesla_per_hz

MAX_FAMILY_DIM = 32


def _quat_mul(p, q):
    # (pw - i p.s)(qw - i q.s) = (pw qw - p.q) - i (pw q + qw p + p x q)
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return (
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + qw * px + py * qz - pz * qy,
        pw * qy + qw * py + pz * qx - px * qz,
        pw * qz + qw * pz + px * qy - py * qx,
    )


def realized_rotation(shape: PulseShape, detuning, moment: float = 1.0):
    """Quaternion of the rotating-frame propagator; broadcasts over ``detuning``."""
    delta = np.atleast_1d(np.asarray(detuning, dtype=float))
    nu = shape.amplitudes * moment * MU_B_HZ_PER_T
    hx = (nu * np.cos(shape.phases))[:, None]
    hy = (nu * np.sin(shape.phases))[:, None]
    dz = np.broadcast_to(delta, (len(nu), len(delta)))
    norm = np.sqrt(hx**2 + hy**2 + dz**2)
    theta = np.pi * shape.dt * norm  # half-angle
    safe = np.where(norm > 0, norm, 1.0)
    s = np.where(norm > 0, np.sin(theta) / safe, 0.0)
    q = (np.cos(theta), s * hx, s * hy, s * dz)
    # pairwise reduction over time, later @ earlier
    while q[0].shape[0] > 1:
        n = q[0].shape[0]
        tail = tuple(c[n - 1:] for c in q) if n % 2 else None
        even = tuple(c[0:n - n % 2:2] for c in q)
        odd = tuple(c[1:n - n % 2:2] for c in q)
        q = _quat_mul(odd, even)
        if tail is not None:
            q = tuple(np.concatenate([a, b]) for a, b in zip(q, tail))
    if q[0].shape[0] == 0:
        one = np.ones_like(delta)
        return (one, 0 * one, 0 * one, 0 * one)
    q = tuple(c[0] for c in q)
    return q


def target_rotation(angle: float, phase: float = 0.0):
    h = angle / 2
    return (np.cos(h), np.sin(h) * np.cos(phase), np.sin(h) * np.sin(phase), 0.0)


def pulse_infidelity(shape: PulseShape, detuning, target=(np.pi, 0.0), moment: float = 1.0):
    """Average gate infidelity of the realised rotation against ``target``.

    ``target`` is ``(angle, phase)`` of the ideal rotation about an equatorial
    axis. Returns a float for scalar detuning, else an array.
    """
    q = realized_rotation(shape, detuning, moment)
    t = target_rotation(*target)
    # Tr(T^dag U) / 2 = tw qw + t.q for unit quaternions
    overlap = t[0] * q[0] + t[1] * q[1] + t[2] * q[2] + t[3] * q[3]
    out = np.clip(1 - (4 * overlap**2 + 2) / 6, 0.0, 1.0)
    return float(out[0]) if np.ndim(detuning) == 0 else out


@dataclass(frozen=True)
class FourierFamily:
    """Smooth two-quadrature envelopes vanishing at both ends.

    ``Omega_x(t) = sum_k a_k sin(k pi t / T)``, ``Omega_y`` likewise with
    ``b_k``; parameters are Rabi frequencies in Hz. Amplitudes above
    ``max_rabi`` are clipped.
    """

    duration: float
    n_terms: int = 4
    n_samples: int = 64
    moment: float = 1.0
    max_rabi: float | None = None

    def __post_init__(self):
        if self.dim > MAX_FAMILY_DIM:
            raise ValueError(f"family dimension {self.dim} exceeds {MAX_FAMILY_DIM}")
        if self.duration <= 0 or self.n_terms < 1:
            raise ValueError("need positive duration and at least one term")

    @property
    def dim(self) -> int:
        return 2 * self.n_terms

    def _basis(self):
        t = (np.arange(self.n_samples) + 0.5) / self.n_samples
        k = np.arange(1, self.n_terms + 1)
        return np.sin(np.pi * np.outer(k, t))

    def pulse(self, params) -> PulseShape:
        params = np.asarray(params, dtype=float)
        basis = self._basis()
        ox = params[: self.n_terms] @ basis
        oy = params[self.n_terms:] @ basis
        rabi = np.hypot(ox, oy)
        if self.max_rabi is not None:
            rabi = np.minimum(rabi, self.max_rabi)
        dt = self.duration / self.n_samples
        return PulseShape(dt, rabi * tesla_per_hz(self.moment), np.arctan2(oy, ox), 0.0, "fourier")

    def initial(self, angle: float, phase: float = 0.0) -> np.ndarray:
        """Single sine lobe calibrated on the discrete grid to rotate by ``angle``."""
        area = self._basis()[0].sum() * self.duration / self.n_samples
        a1 = angle / (2 * np.pi * area)
        p = np.zeros(self.dim)
        p[0] = a1 * np.cos(phase)
        p[self.n_terms] = a1 * np.sin(phase)
        return p

    def fit(self, shape: PulseShape) -> np.ndarray:
        """Least-squares projection of another pulse's quadratures onto the family."""
        t = (np.arange(self.n_samples) + 0.5) / self.n_samples * shape.duration
        idx = np.minimum((t / shape.dt).astype(int), shape.n - 1)
        rabi = shape.amplitudes[idx] * self.moment * MU_B_HZ_PER_T
        basis = self._basis().T
        a = np.linalg.lstsq(basis, rabi * np.cos(shape.phases[idx]), rcond=None)[0]
        b = np.linalg.lstsq(basis, rabi * np.sin(shape.phases[idx]), rcond=None)[0]
        return np.concatenate([a, b])


def smooth_robust_family(rabi_hz: float, angle: float, moment: float = 1.0,
                         n_terms: int = 6, stretch: float = 1.2):
    """Default smooth family and starting point for detuning-robust rotations.

    The family spans ``stretch`` times the three-segment compensating
    sequence with the peak Rabi frequency capped at ``rabi_hz``; the start
    is that sequence's projection onto the family.
    """
    seq = corpse(rabi_hz, angle, moment)
    fam = FourierFamily(stretch * seq.duration, n_terms=n_terms, moment=moment, max_rabi=rabi_hz)
    return fam, fam.fit(seq)


@dataclass
class OptimizeResult:
    pulse: PulseShape
    params: np.ndarray
    worst_initial: float
    worst_final: float
    improved: bool
    detunings: np.ndarray
    seed: int
    nfev: int
    history: list = field(default_factory=list)


def worst_case(shape: PulseShape, detunings, target, moment: float = 1.0) -> float:
    return float(np.max(pulse_infidelity(shape, np.asarray(detunings, dtype=float), target, moment)))


def optimize_pulse(family: FourierFamily, window: tuple[float, float], target=(np.pi, 0.0),
                   n_points: int = 11, seed: int = 0, restarts: int = 4,
                   maxfev: int = 4000, initial=None) -> OptimizeResult:
    """Minimise worst-case infidelity over a symmetric detuning window.

    Nelder-Mead on ``log10(worst + 1e-16)``, restarted from seeded
    perturbations of the incumbent. If nothing beats the starting point it
    is returned unchanged with ``improved=False``.
    """
    lo, hi = window
    if not np.isclose(lo, -hi, rtol=1e-12, atol=0.0):
        raise ValueError("detuning window must be symmetric about 0")
    if n_points < 11:
        raise ValueError("need at least 11 window sample points")
    det = np.linspace(lo, hi, n_points)
    x0 = family.initial(*target) if initial is None else np.asarray(initial, dtype=float)
    scale = max(abs(x0).max(), 1.0)
    moment = family.moment

    def cost(x):
        return np.log10(worst_case(family.pulse(x), det, target, moment) + 1e-16)

    rng = np.random.default_rng(seed)
    best_x, best_f = x0.copy(), cost(x0)
    f_init = best_f
    nfev, history = 1, [float(best_f)]
    for r in range(restarts + 1):
        start = best_x if r == 0 else best_x + 0.1 * scale * rng.standard_normal(best_x.shape)
        res = minimize(cost, start, method="Nelder-Mead",
                       options={"maxfev": maxfev, "xatol": 1e-6 * scale, "fatol": 1e-6,
                                "adaptive": True})
        nfev += res.nfev
        history.append(float(res.fun))
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)
    pulse = family.pulse(best_x)
    w_init = worst_case(family.pulse(x0), det, target, moment)
    w_final = worst_case(pulse, det, target, moment)
    improved = best_f < f_init and w_final < w_init
    if not improved:
        best_x, pulse, w_final = x0, family.pulse(x0), w_init
    return OptimizeResult(pulse, best_x, w_init, w_final, improved, det, seed, nfev, history)
