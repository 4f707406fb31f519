"""Gate-voltage noise and the dephasing it causes in a voltage-tuned spin.

PSDs are single-sided: a white level ``S`` (V^2/Hz) has sample variance
``S / (2 dt)`` at step ``dt``. With that convention a qubit whose frequency
shifts by ``alpha`` Hz per volt loses coherence as ``exp(-pi^2 alpha^2 S t)``.

The 1/f band is synthesised as a sum of exactly discretised
Ornstein-Uhlenbeck (AR(1)) processes. Corner frequencies are log-spaced, at
most an octave apart, from ``f_min / EDGE_FACTOR`` to the smaller of
``f_max * EDGE_FACTOR`` and Nyquist. Their variances are fitted by
nonnegative least squares so that the sampled spectrum matches ``S1 / f``
across ``[f_min, f_max]`` in relative terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import nnls
from scipy.signal import lfilter

JOHNSON_50_OHM_S_V = 1e-18  # V^2/Hz, room-temperature 50 ohm line
EDGE_FACTOR = 16.0


def ar1_psd(f, fc, dt):
    """Single-sided PSD of a unit-variance AR(1) sampled OU process with corner ``fc``."""
    rho = np.exp(-2 * np.pi * np.asarray(fc) * dt)
    return 2 * dt * (1 - rho**2) / (1 + rho**2 - 2 * rho * np.cos(2 * np.pi * np.asarray(f) * dt))


@dataclass(frozen=True)
class NoiseSpectrum:
    S_white: float = 0.0
    S_oneoverf_at_1Hz: float = 0.0
    f_min: float = 1e-2
    f_max: float = 1e3

    def __post_init__(self):
        vals = (self.S_white, self.S_oneoverf_at_1Hz, self.f_min, self.f_max)
        if any(v < 0 for v in vals):
            raise ValueError("noise spectrum entries must be nonnegative")
        if self.S_oneoverf_at_1Hz > 0 and not 0 < self.f_min < self.f_max:
            raise ValueError("1/f band needs 0 < f_min < f_max")

    def psd(self, f):
        """Target single-sided PSD (V^2/Hz)."""
        f = np.asarray(f, dtype=float)
        pink = np.where((f >= self.f_min) & (f <= self.f_max),
                        self.S_oneoverf_at_1Hz / np.where(f > 0, f, 1.0), 0.0)
        return self.S_white + pink

    def components(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """Corner frequencies (Hz) and variances (V^2) of the AR(1) terms at step ``dt``."""
        fc, var = _fit_components(self, float(dt))
        return fc.copy(), var.copy()

    def model_psd(self, f, dt: float):
        """PSD actually synthesised by :func:`generate_noise` at step ``dt``."""
        f = np.asarray(f, dtype=float)
        fc, var = self.components(dt)
        out = np.full_like(f, self.S_white)
        for c, v in zip(fc, var):
            out = out + v * ar1_psd(f, c, dt)
        return out


@lru_cache(maxsize=64)
def _fit_components(spec: NoiseSpectrum, dt: float):
    if spec.S_oneoverf_at_1Hz == 0:
        return np.empty(0), np.empty(0)
    lo = spec.f_min / EDGE_FACTOR
    hi = min(spec.f_max * EDGE_FACTOR, 0.5 / dt)
    n = max(int(np.ceil(np.log2(hi / lo) - 1e-9)) + 1, 2)
    fc = np.geomspace(lo, hi, n)
    f = np.geomspace(spec.f_min, spec.f_max, 8 * n)
    target = spec.S_oneoverf_at_1Hz / f
    design = ar1_psd(f[:, None], fc[None, :], dt) / target[:, None]
    var, _ = nnls(design, np.ones(len(f)))
    return fc, var


@dataclass(frozen=True)
class VcoModel:
    """Qubit frequency ``base + alpha * V``; alpha in Hz/V taken at the bias point."""

    alpha: float
    base: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")


def dephasing_rate(alpha: float, S_white: float) -> float:
    """1/t_phi = pi^2 alpha^2 S_V (1/s)."""
    if alpha < 0 or S_white < 0:
        raise ValueError("alpha and S_V must be nonnegative")
    return float(np.pi**2 * alpha**2 * S_white)


def generate_noise(spec: NoiseSpectrum, dt: float, n: int, seed) -> np.ndarray:
    """Stationary Gaussian voltage trace of ``n`` samples at step ``dt``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n < 2:
        raise ValueError("need at least two samples")
    nyquist = 0.5 / dt
    if spec.S_oneoverf_at_1Hz > 0 and spec.f_max > nyquist:
        raise ValueError(f"f_max = {spec.f_max} Hz exceeds the Nyquist frequency {nyquist} Hz")
    rng = np.random.default_rng(seed)
    out = np.zeros(n)
    if spec.S_white > 0:
        out += rng.standard_normal(n) * np.sqrt(spec.S_white / (2 * dt))
    for fc, var in zip(*_fit_components(spec, float(dt))):
        s = np.sqrt(var)
        rho = np.exp(-2 * np.pi * fc * dt)
        xi = rng.standard_normal(n)
        xi[0] *= s
        xi[1:] *= s * np.sqrt(1 - rho**2)
        out += lfilter([1.0], [1.0, -rho], xi)
    return out


@dataclass
class CoherenceResult:
    t: np.ndarray
    coherence: np.ndarray
    stderr: np.ndarray
    trials: int
    seed: int
    eq4_rate: float
    fitted_rate: float | None
    short_time_exponent: float | None
    gaussian_short_time: bool

    def rows(self):
        return list(zip(self.t.tolist(), self.coherence.tolist(), self.stderr.tolist()))


def _fit_rate(t, c, lo=0.2, hi=0.98):
    sel = (c > lo) & (c < hi)
    if sel.sum() < 3:
        return None
    # least squares for -ln C = gamma t through the origin
    y = -np.log(c[sel])
    return float(np.dot(t[sel], y) / np.dot(t[sel], t[sel]))


def _short_time_exponent(t, c, hi=0.999, lo=0.9):
    sel = (c < hi) & (c > lo) & (t > 0)
    if sel.sum() < 3:
        return None
    slope = np.polyfit(np.log(t[sel]), np.log(-np.log(c[sel])), 1)[0]
    return float(slope)


def mc_coherence(vco: VcoModel, spec: NoiseSpectrum, t_total: float, trials: int, seed: int,
                 n_steps: int = 500) -> CoherenceResult:
    """Monte Carlo estimate of |<exp(i 2 pi alpha int V dt)>| on a uniform time grid.

    Each trial draws its trace from its own child of ``SeedSequence(seed)``,
    so results do not depend on evaluation order.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    dt = t_total / n_steps
    t = np.arange(1, n_steps + 1) * dt
    re = np.zeros(n_steps)
    im = np.zeros(n_steps)
    re2 = np.zeros(n_steps)
    im2 = np.zeros(n_steps)
    for child in np.random.SeedSequence(seed).spawn(trials):
        v = generate_noise(spec, dt, n_steps, child)
        phi = 2 * np.pi * vco.alpha * np.cumsum(v) * dt
        c, s = np.cos(phi), np.sin(phi)
        re += c
        im += s
        re2 += c * c
        im2 += s * s
    re /= trials
    im /= trials
    coh = np.hypot(re, im)
    var = (re2 / trials - re**2) + (im2 / trials - im**2)
    stderr = np.sqrt(np.maximum(var, 0.0) / trials)
    rate = dephasing_rate(abs(vco.alpha), spec.S_white)
    fitted = _fit_rate(t, coh)
    expo = _short_time_exponent(t, coh)
    return CoherenceResult(t, coh, stderr, trials, seed, rate, fitted, expo,
                           bool(expo is not None and expo > 1.5))
