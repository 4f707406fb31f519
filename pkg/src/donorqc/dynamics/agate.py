"""Hyperfine coupling A as a function of A-gate voltage.

Only a qualitative curve is available, so the shape here is a replaceable
strategy: A falls from ``A0`` to ``A0 * (1 - depth)`` between ``v0`` and
``v2`` following a regularised incomplete beta function. Its derivative is a
beta-shaped bump that vanishes at both ends and peaks exactly at ``v1``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import betainc

from ..species import DonorSpecies
from ..spin import donor_spectrum


@dataclass(frozen=True)
class AGateCurve:
    A0: float = 30.0e6
    v0: float = 0.0
    v1: float = 0.5
    v2: float = 1.0
    width: float = 0.15
    depth: float = 0.5

    def __post_init__(self):
        if not self.v0 < self.v1 < self.v2:
            raise ValueError("need v0 < v1 < v2")
        if not 0 < self.depth < 1:
            raise ValueError("depth must lie in (0, 1)")
        if self.width <= 0:
            raise ValueError("width must be positive")

    @property
    def exponents(self) -> tuple[float, float]:
        span = self.v2 - self.v0
        m = (self.v1 - self.v0) / span
        sigma = self.width / span
        k = m * (1 - m) / sigma**2
        # exponents >= 2 keep the slope flat (zero first and second derivative) at the ends
        k = max(k, 2.0 / min(m, 1 - m))
        return k * m, k * (1 - m)

    def _u(self, V):
        return np.clip((np.asarray(V, dtype=float) - self.v0) / (self.v2 - self.v0), 0.0, 1.0)

    def value(self, V):
        a, b = self.exponents
        return self.A0 * (1 - self.depth * betainc(a + 1, b + 1, self._u(V)))

    def slope(self, V):
        """Analytic dA/dV (Hz/V); zero outside [v0, v2]."""
        a, b = self.exponents
        u = self._u(V)
        bump = u**a * (1 - u) ** b / beta_fn(a + 1, b + 1)
        return -self.A0 * self.depth * bump / (self.v2 - self.v0)


def a_gate_hyperfine(V: float, curve: AGateCurve) -> float:
    """A(V) in Hz; voltages outside [v0, v2] are clamped with a warning."""
    if V < curve.v0 or V > curve.v2:
        warnings.warn(f"A-gate voltage {V} outside [{curve.v0}, {curve.v2}]; clamped", stacklevel=2)
    return float(curve.value(V))


def resonance_frequency(V: float, curve: AGateCurve, species: DonorSpecies, B: float,
                        levels: tuple[int, int] = (0, 1)) -> float:
    """Transition frequency between two eigenlevels with A set by the gate."""
    sp = species.replace(A=float(curve.value(V)) / species.strain_factor)
    lv = donor_spectrum(sp, B).levels
    return float(abs(lv[levels[1]] - lv[levels[0]]))


def alpha(V: float, curve: AGateCurve, species: DonorSpecies, B: float,
          levels: tuple[int, int] = (0, 1), h: float | None = None) -> float:
    """VCO tuning parameter d(nu)/dV (Hz/V) by central finite difference."""
    if h is None:
        h = 1e-4 * (curve.v2 - curve.v0)
    f = lambda v: resonance_frequency(v, curve, species, B, levels)  # noqa: E731
    return (f(V + h) - f(V - h)) / (2 * h)
