import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from donorqc import SI_P
from donorqc.constants import MU_B_HZ_PER_T
from donorqc.coupling import (
    RegimeError,
    TwoDonorSystem,
    build_two_donor_hamiltonian,
    exchange_J,
    exchange_peak_radius,
    nu_J,
    nu_J_exact,
    spacing_for_exchange,
)
from donorqc.spin import donor_spectrum
from oracles import MU_B_HZ, bisect, exchange_hz


def test_exchange_matches_direct_formula():
    r = 10 * SI_P.a_B
    ratio = exchange_J(r) / exchange_hz(r, SI_P.E_b, SI_P.a_B)
    assert ratio == pytest.approx(1.0, rel=1e-12)
    assert exchange_J(r) / exchange_hz(r, 1.0, r) * np.exp(-2) == pytest.approx(
        SI_P.E_b * 10**2.5 * np.exp(-20), rel=1e-12)


def test_exchange_peak_and_monotone():
    r0 = exchange_peak_radius()
    assert r0 == pytest.approx(1.25 * SI_P.a_B)
    eps = 1e-6 * r0
    assert exchange_J(r0) > exchange_J(r0 - eps) and exchange_J(r0) > exchange_J(r0 + eps)
    r = np.linspace(r0 * 1.001, 100 * SI_P.a_B, 400)
    J = exchange_J(r)
    assert np.all(J > 0)
    assert np.all(np.diff(J) < 0)


def test_exchange_rejects_nonpositive_r():
    with pytest.raises(ValueError):
        exchange_J(0.0)


def test_spacing_matches_bisection_oracle():
    target = MU_B_HZ * 1.0
    r = spacing_for_exchange(target)
    ref = bisect(lambda x: exchange_hz(x, SI_P.E_b, SI_P.a_B) - target,
                 1.25 * SI_P.a_B, 100 * SI_P.a_B)
    assert r == pytest.approx(ref, rel=1e-9)
    assert r == pytest.approx(163.4e-10, rel=1e-3)
    with pytest.raises(ValueError):
        spacing_for_exchange(1e30)


def test_nu_j_zero_and_regime():
    assert nu_J(30e6, 2.0, 0.0) == 0.0
    z = MU_B_HZ_PER_T * 2.0
    with pytest.raises(RegimeError, match="2J < mu_B B/h"):
        nu_J(30e6, 2.0, z / 2)
    with pytest.raises(ValueError):
        nu_J(0.0, 2.0, 1.0)


def test_nu_j_quarter_zeeman_against_exact():
    z = MU_B_HZ_PER_T * 2.0
    sys = TwoDonorSystem(SI_P, SI_P, 2.0, 0.25 * z)
    approx = nu_J(SI_P.A, 2.0, sys.J)
    exact = nu_J_exact(sys)
    assert abs(approx - exact) / exact < 0.05


def test_nu_j_exact_zero_exchange_and_symmetry():
    assert nu_J_exact(TwoDonorSystem(SI_P, SI_P, 2.0, 0.0)) == 0.0
    left = SI_P.replace(A=28e6)
    sys = TwoDonorSystem(left, SI_P, 2.0, 5e9)
    assert nu_J_exact(sys) == pytest.approx(nu_J_exact(sys.swapped()), rel=1e-9)


def test_nu_j_exact_regime():
    z = MU_B_HZ_PER_T * 1.0
    with pytest.raises(RegimeError):
        nu_J_exact(TwoDonorSystem(SI_P, SI_P, 1.0, z))
    assert not TwoDonorSystem(SI_P, SI_P, 1.0, z).valid


def test_two_donor_tensor_sum_at_zero_exchange():
    left = SI_P.replace(A=31e6)
    sys = TwoDonorSystem(left, SI_P, 1.5, 0.0)
    w = np.linalg.eigvalsh(build_two_donor_hamiltonian(sys))
    a = donor_spectrum(left, 1.5).levels
    b = donor_spectrum(SI_P, 1.5).levels
    ref = np.sort((a[:, None] + b[None, :]).ravel())
    assert np.max(np.abs(w - ref)) <= 1e-9 * np.max(np.abs(ref))


def test_heisenberg_limit():
    # with vanishing hyperfine the electron pair is singlet -3J, triplet +J
    tiny = SI_P.replace(A=1e-6)
    J = 1e9
    w = np.linalg.eigvalsh(build_two_donor_hamiltonian(TwoDonorSystem(tiny, tiny, 0.0, J)))
    assert np.allclose(np.sort(w)[:4], -3 * J, atol=1e-3)
    assert np.allclose(np.sort(w)[4:], J, atol=1e-3)


def test_negative_exchange_rejected():
    with pytest.raises(ValueError):
        TwoDonorSystem(J=-1.0)


@settings(max_examples=25, deadline=None)
@given(B=st.floats(0.5, 5), fracJ=st.floats(0.0, 0.45))
def test_two_donor_hermitian_and_trace(B, fracJ):
    sys = TwoDonorSystem(SI_P, SI_P.replace(A=25e6), B, fracJ * MU_B_HZ_PER_T * B)
    H = build_two_donor_hamiltonian(sys)
    assert np.linalg.norm(H - H.conj().T) <= 1e-12 * np.linalg.norm(H)
    w = np.linalg.eigvalsh(H)
    assert abs(w.sum() - np.trace(H).real) <= 1e-9 * np.abs(w).sum()


@settings(max_examples=30, deadline=None)
@given(j1=st.floats(0.01, 0.49), j2=st.floats(0.01, 0.49))
def test_nu_j_increasing_in_exchange(j1, j2):
    if abs(j1 - j2) < 1e-6:
        return
    z = MU_B_HZ_PER_T * 2.0
    lo, hi = sorted((j1, j2))
    assert nu_J(SI_P.A, 2.0, lo * z) < nu_J(SI_P.A, 2.0, hi * z)
