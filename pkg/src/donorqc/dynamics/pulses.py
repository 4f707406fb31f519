"""Sampled RF pulse shapes and the shipped pulse families."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..constants import H, MU_B


def tesla_per_hz(moment: float) -> float:
    """Drive amplitude (T) giving 1 Hz Rabi frequency on a transition of ``moment`` mu_B."""
    return H / (moment * MU_B)


@dataclass(frozen=True)
class PulseShape:
    """Piecewise-constant RF envelope.

    ``amplitudes`` (T) and ``phases`` (rad) hold one value per interval of
    length ``dt``. The lab-frame field is ``amp * cos(2 pi carrier t + phase)``.
    """

    dt: float
    amplitudes: np.ndarray
    phases: np.ndarray
    carrier: float = 0.0
    label: str = ""
    max_step: float = field(init=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        phases = np.broadcast_to(np.asarray(self.phases, dtype=float), amps.shape).copy()
        if amps.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if np.any(amps < 0):
            raise ValueError("amplitudes must be nonnegative; encode sign in the phase")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phases)
        step = float(np.max(np.abs(np.diff(amps)), initial=0.0))
        object.__setattr__(self, "max_step", step)

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    @property
    def duration(self) -> float:
        return self.n * self.dt

    @property
    def times(self) -> np.ndarray:
        """Interval start times."""
        return np.arange(self.n) * self.dt

    def area(self) -> float:
        """Integral of the envelope (T s)."""
        return float(self.amplitudes.sum() * self.dt)

    def scaled(self, factor: float) -> "PulseShape":
        return PulseShape(self.dt, self.amplitudes * factor, self.phases, self.carrier, self.label)

    def stretched(self, factor: int) -> "PulseShape":
        """Same envelope with each sample repeated ``factor`` times at dt/factor."""
        return PulseShape(
            self.dt / factor,
            np.repeat(self.amplitudes, factor),
            np.repeat(self.phases, factor),
            self.carrier,
            self.label,
        )

    def with_carrier(self, carrier: float) -> "PulseShape":
        return PulseShape(self.dt, self.amplitudes, self.phases, carrier, self.label)

    def metadata(self) -> dict:
        return {
            "label": self.label,
            "carrier_hz": self.carrier,
            "dt_s": self.dt,
            "n_samples": self.n,
            "duration_s": self.duration,
            "max_amp_step_tesla": self.max_step,
        }


def rectangular(rabi_hz: float, angle: float, moment: float = 1.0, n: int = 64,
                phase: float = 0.0, carrier: float = 0.0) -> PulseShape:
    """Constant-amplitude pulse rotating by ``angle`` at Rabi frequency ``rabi_hz``."""
    duration = angle / (2 * np.pi * rabi_hz)
    amp = rabi_hz * tesla_per_hz(moment)
    return PulseShape(duration / n, np.full(n, amp), np.full(n, phase), carrier, "rectangular")


def hann(peak_rabi_hz: float, angle: float, moment: float = 1.0, n: int = 256,
         phase: float = 0.0, carrier: float = 0.0) -> PulseShape:
    """Raised-cosine envelope with peak Rabi frequency ``peak_rabi_hz``.

    Midpoint sampling makes the discrete area exactly half the peak times
    the duration, so the rotation angle is exact.
    """
    duration = angle / (np.pi * peak_rabi_hz)
    t = (np.arange(n) + 0.5) / n
    amp = peak_rabi_hz * tesla_per_hz(moment) * np.sin(np.pi * t) ** 2
    return PulseShape(duration / n, amp, np.full(n, phase), carrier, "hann")


def corpse_angles(theta: float) -> tuple[float, float, float]:
    """Rotation angles of the off-resonance-compensating three-pulse sequence."""
    k = np.arcsin(np.sin(theta / 2) / 2)
    return (2 * np.pi + theta / 2 - k, 2 * np.pi - 2 * k, theta / 2 - k)


def corpse(rabi_hz: float, theta: float, moment: float = 1.0, samples_per_turn: int = 64,
           phase: float = 0.0, carrier: float = 0.0) -> PulseShape:
    """Three rectangular segments (phases 0, pi, 0) compensating resonance offset.

    Each segment gets an integer number of samples; its amplitude is trimmed
    (never raised above ``rabi_hz``) so that the segment angle is exact.
    """
    angles = corpse_angles(theta)
    dt = 1.0 / (rabi_hz * samples_per_turn)
    amps, phases = [], []
    for ang, ph in zip(angles, (0.0, np.pi, 0.0)):
        n = max(1, int(np.ceil(ang / (2 * np.pi * rabi_hz * dt) - 1e-9)))
        rabi = ang / (2 * np.pi * n * dt)
        amps.append(np.full(n, rabi * tesla_per_hz(moment)))
        phases.append(np.full(n, phase + ph))
    return PulseShape(dt, np.concatenate(amps), np.concatenate(phases), carrier, "corpse")


def write_pulse_csv(pulse: PulseShape, path: str | Path) -> tuple[Path, Path]:
    """Write ``t_s,amp_tesla,phase_rad`` rows plus a JSON metadata sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "amp_tesla", "phase_rad"])
        for t, a, p in zip(pulse.times, pulse.amplitudes, pulse.phases):
            w.writerow([repr(float(t)), repr(float(a)), repr(float(p))])
    meta = path.with_suffix(".meta.json")
    meta.write_text(json.dumps(pulse.metadata(), indent=2, sort_keys=True) + "\n")
    return path, meta


def read_pulse_csv(path: str | Path) -> PulseShape:
    path = Path(path)
    meta = json.loads(path.with_suffix(".meta.json").read_text())
    rows = [r for r in csv.reader(line for line in path.open() if not line.startswith("#"))]
    data = np.array(rows[1:], dtype=float).reshape(-1, 3)
    return PulseShape(meta["dt_s"], data[:, 1], data[:, 2], meta["carrier_hz"], meta.get("label", ""))
