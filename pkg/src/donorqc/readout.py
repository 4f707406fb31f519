"""Phenomenological spin-to-charge readout and field-emission leakage.

Readout model (all times exponential, independent):

* Product states with antiparallel spins are first projected onto singlet or
  triplet-0 with probability 1/2 each.
* A singlet is reported when its charge transfer, with time constant
  ``t_ST``, completes inside the window *and* no spin flip (time constant
  ``t_flip``) occurs in the window. This gives the closed form
  ``F = (1 - exp(-t/t_ST)) exp(-t/t_flip)``.
* A triplet is reported unless a spin flip at time ``s`` turns it into a
  singlet (probability 1/2) whose transfer then completes before ``t_meas``.

The SET is idealised: charge position is read instantly at threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import E_CHARGE, HBAR, M_E

STATE_LABELS = ("dd", "du", "ud", "uu", "S", "T0")
_ALIASES = {"↓↓": "dd", "↓↑": "du", "↑↓": "ud", "↑↑": "uu"}

# Threshold fields (V/m) are free parameters; only their ordering matters here.
DEFAULT_THRESHOLDS = {"Te": (1.0e7, 2.0e6), "P": (3.0e5, 2.0e5)}


@dataclass(frozen=True)
class ReadoutParams:
    t_meas: float = 10e-6
    t_ST: float = 1e-6
    t_flip: float = 1.0
    donor_kind: str = "Te"
    F_singlet: float | None = None
    F_triplet: float | None = None

    def __post_init__(self):
        if min(self.t_meas, self.t_ST, self.t_flip) <= 0:
            raise ValueError("readout times must be positive")
        if self.donor_kind not in DEFAULT_THRESHOLDS:
            raise ValueError(f"donor_kind must be one of {sorted(DEFAULT_THRESHOLDS)}")
        fs, ft = DEFAULT_THRESHOLDS[self.donor_kind]
        if self.F_singlet is None:
            object.__setattr__(self, "F_singlet", fs)
        if self.F_triplet is None:
            object.__setattr__(self, "F_triplet", ft)

    @property
    def window_ok(self) -> bool:
        return self.t_ST < self.t_flip


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    t_opt: float
    fidelity_opt: float
    warning: str | None


def fidelity_at(t, t_ST: float, t_flip: float):
    t = np.asarray(t, dtype=float)
    return -np.expm1(-t / t_ST) * np.exp(-t / t_flip)


def optimal_measurement_time(t_ST: float, t_flip: float) -> float:
    """Stationary point of F: t* = t_ST ln(1 + t_flip / t_ST)."""
    return float(t_ST * np.log1p(t_flip / t_ST))


def readout_fidelity(params: ReadoutParams) -> FidelityReport:
    warn = None
    if not params.window_ok:
        warn = "t_ST >= t_flip: no measurement window separates singlet transfer from spin flips"
    t_opt = optimal_measurement_time(params.t_ST, params.t_flip)
    return FidelityReport(float(fidelity_at(params.t_meas, params.t_ST, params.t_flip)),
                          t_opt, float(fidelity_at(t_opt, params.t_ST, params.t_flip)), warn)


def _triplet_to_singlet(t, a, b):
    """P(flip at s < t, Born 1/2 to singlet, transfer within t - s)."""
    x = t / b
    if np.isclose(a, b, rtol=1e-9):
        cross = (t / a) * np.exp(-t / a)
    else:
        cross = (np.exp(-t / a) - np.exp(-x)) / (1 - b / a)
    return 0.5 * (-np.expm1(-x) - cross)


def normalize_label(state: str) -> str:
    s = _ALIASES.get(state, state)
    if s not in STATE_LABELS:
        raise ValueError(f"unknown two-electron state {state!r}; use one of {STATE_LABELS}")
    return s


def singlet_probability(state: str, params: ReadoutParams) -> float:
    """Closed-form probability of a singlet outcome under the model above."""
    s = normalize_label(state)
    t, a, b = params.t_meas, params.t_ST, params.t_flip
    f_s = float(fidelity_at(t, a, b))
    f_t = float(_triplet_to_singlet(t, a, b))
    if s == "S":
        return f_s
    if s in ("du", "ud"):
        return 0.5 * (f_s + f_t)
    return f_t


@dataclass
class ReadoutBatch:
    state: str
    singlet: np.ndarray  # bool per trial
    projected_singlet: np.ndarray  # bool per trial, after the Born step
    flipped: np.ndarray
    transfer_time: np.ndarray  # s; nan when no transfer was seen

    @property
    def singlet_fraction(self) -> float:
        return float(self.singlet.mean())


@dataclass(frozen=True)
class ReadoutOutcome:
    outcome: str  # "singlet" or "triplet"
    charge_moved_at: str  # "F_singlet" or "F_triplet"
    threshold_field: float
    transfer_time: float | None
    flipped: bool
    projected: str


def simulate_readout_batch(state: str, params: ReadoutParams, trials: int, seed) -> ReadoutBatch:
    s = normalize_label(state)
    rng = np.random.default_rng(seed)
    t = params.t_meas
    born = rng.random(trials) < 0.5
    flip = rng.exponential(params.t_flip, trials)
    transfer = rng.exponential(params.t_ST, trials)
    to_s = rng.random(trials) < 0.5
    if s == "S":
        proj = np.ones(trials, bool)
    elif s in ("du", "ud"):
        proj = born
    else:
        proj = np.zeros(trials, bool)
    flipped = flip < t
    direct = proj & (transfer < t) & ~flipped
    late = ~proj & flipped & to_s & (flip + transfer < t)
    single = direct | late
    ttime = np.where(direct, transfer, np.where(late, flip + transfer, np.nan))
    return ReadoutBatch(s, single, proj, flipped, ttime)


def simulate_readout(state: str, params: ReadoutParams, seed) -> ReadoutOutcome:
    b = simulate_readout_batch(state, params, 1, seed)
    sing = bool(b.singlet[0])
    tt = float(b.transfer_time[0])
    return ReadoutOutcome(
        "singlet" if sing else "triplet",
        "F_singlet" if sing else "F_triplet",
        params.F_singlet if sing else params.F_triplet,
        None if np.isnan(tt) else tt,
        bool(b.flipped[0]),
        "S" if b.projected_singlet[0] else "T",
    )


# Fowler-Nordheim leakage through a triangular barrier

SI_MASSES = {"m_t": 0.19, "m_l": 0.92}


@dataclass(frozen=True)
class TunnelBarrier:
    phi_eV: float = 0.1
    mass: float = SI_MASSES["m_t"]
    attempt_rate: float = 1e13
    label: str = "m_t"

    def __post_init__(self):
        if self.phi_eV <= 0 or self.mass <= 0 or self.attempt_rate <= 0:
            raise ValueError("barrier height, mass and attempt rate must be positive")

    def slope(self) -> float:
        """d ln(rate) / d(1/F) in V/m."""
        e_phi = self.phi_eV * E_CHARGE
        return -4 * np.sqrt(2 * self.mass * M_E) * e_phi**1.5 / (3 * HBAR * E_CHARGE)


def fn_tunneling_rate(F, barrier: TunnelBarrier):
    F = np.asarray(F, dtype=float)
    if np.any(F <= 0):
        raise ValueError("field must be positive")
    r = barrier.attempt_rate * np.exp(barrier.slope() / F)
    return float(r) if r.ndim == 0 else r


def fn_table(F_values, phi_eV: float = 0.1, attempt_rate: float = 1e13,
             masses: dict | None = None) -> list[tuple[float, float, str]]:
    """Rows ``(F_v_per_m, rate_hz, mass_label)`` for each mass."""
    masses = SI_MASSES if masses is None else masses
    rows = []
    for label, m in masses.items():
        b = TunnelBarrier(phi_eV, m, attempt_rate, label)
        rates = np.atleast_1d(fn_tunneling_rate(np.asarray(F_values, dtype=float), b))
        rows.extend((float(F), float(r), label) for F, r in zip(F_values, rates))
    return rows
