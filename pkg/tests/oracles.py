"""Independent reference implementations used by the tests.

Nothing here calls into the package's numerical routines; each oracle is a
closed form or a brute-force construction of the same quantity.
"""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np
import scipy.constants as sc

MU_B_HZ = sc.physical_constants["Bohr magneton in Hz/T"][0]
MU_N_HZ = sc.physical_constants["nuclear magneton in MHz/T"][0] * 1e6


def breit_rabi_levels(A: float, g_n: float, B: float) -> np.ndarray:
    """Sorted eigenvalues (Hz) of w_e sz_e - w_n sz_n + A s_e.s_n with Pauli matrices.

    |uu> and |dd> are eigenstates; |ud>, |du> mix in a 2x2 block with
    diagonal (w_e + w_n - A, -w_e - w_n - A) and off-diagonal 2A.
    """
    we = MU_B_HZ * B
    wn = g_n * MU_N_HZ * B
    root = np.sqrt((we + wn) ** 2 + 4 * A**2)
    return np.sort([we - wn + A, -we + wn + A, -A + root, -A - root])


def rabi_infidelity(rabi: float, detuning: float, angle: float) -> float:
    """Average infidelity of a square pulse of nominal ``angle`` at a resonance offset."""
    t = angle / (2 * np.pi * rabi)
    w = np.hypot(rabi, detuning)
    a, a0 = 2 * np.pi * w * t, 2 * np.pi * rabi * t
    overlap = abs(np.cos(a / 2) * np.cos(a0 / 2) + np.sin(a / 2) * np.sin(a0 / 2) * rabi / w)
    return 1 - (2 * overlap**2 + 1) / 3


def rabi_transfer(rabi: float, detuning: float, t: float) -> float:
    """Two-level population transfer probability after time ``t``."""
    w = np.hypot(rabi, detuning)
    return (rabi / w) ** 2 * np.sin(np.pi * w * t) ** 2


def bisect(f, lo: float, hi: float, tol: float = 1e-15) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol * abs(hi):
            break
    return 0.5 * (lo + hi)


def exchange_hz(r: float, E_b_eV: float, a_B: float) -> float:
    x = r / a_B
    return E_b_eV * sc.e / sc.h * x**2.5 * np.exp(-2 * x)


def fridge_enumeration(p: float) -> tuple[float, float]:
    """(singlet fraction, passed polarization) by enumerating product pairs."""
    up = (1 + p) / 2
    prob = {1: up, -1: 1 - up}
    singlet = 0.0
    m_passed, w_passed = 0.0, 0.0
    for s1, s2 in itertools.product((1, -1), repeat=2):
        w = prob[s1] * prob[s2]
        if s1 != s2:
            singlet += w / 2  # Born weight on the singlet
            w_passed += w / 2  # triplet-0, zero magnetisation
        else:
            w_passed += w
            m_passed += w * s1  # per-spin magnetisation of a parallel pair
    return singlet, m_passed / w_passed


def grid_graph(rows: list[str], src) -> nx.Graph:
    """4-connected graph over shuttle gates plus the source cell."""
    g = nx.Graph()
    cells = {(r, c) for r, line in enumerate(rows) for c, ch in enumerate(line) if ch == "G"}
    cells.add(tuple(src))
    for r, c in cells:
        g.add_node((r, c))
        for dr, dc in ((1, 0), (0, 1)):
            n = (r + dr, c + dc)
            if n in cells:
                g.add_edge((r, c), n)
    return g


def bfs_length(rows: list[str], src, dst) -> int | None:
    """Number of moves on a shortest path, or None when unreachable."""
    g = grid_graph(rows, src)
    g.add_node(tuple(dst))
    try:
        return nx.shortest_path_length(g, tuple(src), tuple(dst))
    except nx.NetworkXNoPath:
        return None


def bfs_to_any(rows: list[str], src, targets) -> int | None:
    lengths = [bfs_length(rows, src, t) for t in targets]
    lengths = [n for n in lengths if n is not None]
    return min(lengths) if lengths else None


def r_squared(x, y) -> float:
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return 1 - np.sum(resid**2) / np.sum((y - np.mean(y)) ** 2)
