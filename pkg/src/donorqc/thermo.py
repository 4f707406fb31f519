"""Equilibrium electron polarisation and singlet-rejection spin refrigeration.

A refrigerator stage takes random pairs from a reservoir of polarisation
``p``, projects each pair onto singlet/triplet, discards singlets and passes
triplets. Pairs are independent product states with P(up) = (1 + p) / 2.
The discarded singlets carry no magnetisation, so the passed triplets carry
all of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import K_B, MU_B


def equilibrium_polarization(B, T):
    """tanh(mu_B B / k_B T) for a g = 2 electron; broadcasts over arrays."""
    B = np.asarray(B, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(T <= 0):
        raise ValueError("temperature must be positive")
    if np.any(B < 0):
        raise ValueError("magnetic field must be nonnegative")
    p = np.tanh(MU_B * B / (K_B * T))
    return float(p) if p.ndim == 0 else p


def polarization_grid(B_values, T_values) -> list[tuple[float, float, float]]:
    """Rows ``(B_tesla, T_kelvin, polarization)``, B varying slowest."""
    rows = []
    for B in B_values:
        p = equilibrium_polarization(B, np.asarray(T_values, dtype=float))
        rows.extend((float(B), float(T), float(pp)) for T, pp in zip(T_values, np.atleast_1d(p)))
    return rows


def iso_polarization_field(p: float, T):
    """Field giving polarisation ``p`` at temperature ``T``; contours are B/T = const."""
    if not 0 <= p < 1:
        raise ValueError("contour level must lie in [0, 1)")
    return np.arctanh(p) * K_B * np.asarray(T, dtype=float) / MU_B


@dataclass(frozen=True)
class Reservoir:
    p: float
    count: float = 1.0

    def __post_init__(self):
        if abs(self.p) > 1:
            raise ValueError("polarization must lie in [-1, 1]")


@dataclass(frozen=True)
class StageResult:
    """Per input spin: magnetisation_in = p_in, out = pass * p_out + sink."""

    p_in: float
    p_out: float
    pass_fraction: float
    rejected_fraction: float
    magnetization_in: float
    magnetization_out_plus_sink: float


def fridge_stage(p_in: float) -> StageResult:
    if abs(p_in) > 1:
        raise ValueError("polarization must lie in [-1, 1]")
    p2 = p_in * p_in
    singlet = (1 - p2) / 4
    passed = 1 - singlet
    p_out = 4 * p_in / (3 + p2)
    sink = 0.0  # singlets are unpolarised
    return StageResult(p_in, p_out, passed, singlet, p_in, passed * p_out + singlet * sink)


@dataclass(frozen=True)
class CascadeResult:
    polarizations: tuple[float, ...]  # index 0 is the input
    yields: tuple[float, ...]  # cumulative pass fraction after each stage

    def first_stage_reaching(self, target: float) -> int | None:
        for k, p in enumerate(self.polarizations):
            if p >= target:
                return k
        return None


def fridge_cascade(p_in: float, stages: int) -> CascadeResult:
    if stages < 1:
        raise ValueError("need at least one stage")
    ps, ys = [p_in], []
    y = 1.0
    for _ in range(stages):
        r = fridge_stage(ps[-1])
        y *= r.pass_fraction
        ps.append(r.p_out)
        ys.append(y)
    return CascadeResult(tuple(ps), tuple(ys))


@dataclass(frozen=True)
class MCStageResult:
    p_in: float
    pairs: int
    seed: int
    singlet_count: int
    p_out: float
    p_out_stderr: float
    singlet_fraction: float
    singlet_fraction_stderr: float
    magnetization_in: float  # sampled input, per spin
    magnetization_out_plus_sink: float
    magnetization_stderr: float
    outcomes: np.ndarray  # True where the pair was rejected as a singlet

    def as_stage(self) -> StageResult:
        f = self.singlet_fraction
        return StageResult(self.p_in, self.p_out, 1 - f, f, self.magnetization_in,
                           self.magnetization_out_plus_sink)


def mc_fridge(p_in: float, pairs: int, seed: int) -> MCStageResult:
    """Sample pairs, apply Born-rule singlet/triplet projection, tally outputs."""
    if pairs < 1000:
        raise ValueError("need at least 1000 pairs")
    if abs(p_in) > 1:
        raise ValueError("polarization must lie in [-1, 1]")
    rng = np.random.default_rng(seed)
    spins = np.where(rng.random((pairs, 2)) < (1 + p_in) / 2, 1, -1)
    anti = spins[:, 0] != spins[:, 1]
    singlet = anti & (rng.random(pairs) < 0.5)
    # passed pair magnetisation: +-2 for parallel pairs, 0 for triplet-0
    m_pair = spins.sum(axis=1)
    passed = ~singlet
    n_pass = int(passed.sum())
    spin_vals = np.repeat(m_pair[passed] / 2.0, 2)
    p_out = float(spin_vals.mean()) if n_pass else 0.0
    # pairs are the independent units; stderr from per-pair means
    p_err = float(np.std(m_pair[passed] / 2.0, ddof=1) / np.sqrt(n_pass)) if n_pass > 1 else 0.0
    f = float(singlet.mean())
    m_in = float(spins.mean())
    m_out = float(np.where(passed, m_pair, 0).sum() / (2 * pairs))
    m_err = float(np.std(m_pair / 2.0, ddof=1) / np.sqrt(pairs))
    return MCStageResult(p_in, pairs, seed, int(singlet.sum()), p_out, p_err, f,
                         float(np.sqrt(f * (1 - f) / pairs)), m_in, m_out, m_err, singlet)
