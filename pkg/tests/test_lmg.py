import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, strategies as st

from critmet import lmg
from critmet.errors import DomainError, ValidationError


def test_parity_blocks_reproduce_full_spectrum():
    p = lmg.LmgParams(9, 1.0, 1.7)
    es = lmg.eigensystem(p)
    npt.assert_allclose(es.values, np.linalg.eigvalsh(lmg.hamiltonian(p)), atol=1e-12)
    ql = lmg.eigensystem(p, method="ql")
    npt.assert_allclose(ql.values, es.values, atol=1e-10)
    par = lmg.parity(9)
    # every eigenvector lives in one parity sector
    npt.assert_allclose(np.abs(np.sum(par[:, None] * es.vectors ** 2, axis=0)), 1.0, atol=1e-12)


def test_eigenstate_response_against_finite_difference():
    p = lmg.LmgParams(10, 1.0, 0.7)
    r = lmg.eigenstate_response(p, 2)
    m = np.arange(11) - 5.0

    def state(w):
        return lmg.eigensystem(lmg.LmgParams(10, w, 0.7)).vectors[:, 2]

    v0, vp, vm = state(1.0), state(1.0 + 1e-6), state(1.0 - 1e-6)
    vp *= np.sign(vp @ v0)
    vm *= np.sign(vm @ v0)
    dv = (vp - vm) / 2e-6
    npt.assert_allclose(r.qfi, 4 * (dv @ dv - (v0 @ dv) ** 2), rtol=1e-6)
    npt.assert_allclose(r.dsz, (vp * vp - vm * vm) @ m / 2e-6, rtol=1e-6)
    assert r.excluded_pairs == 0


def test_uncoupled_ground_state():
    r = lmg.eigenstate_response(lmg.LmgParams(10, 1.0, 0.0), 0)
    assert r.qfi == 0.0 and r.sz_variance == 0.0
    with pytest.raises(DomainError):
        r.snr


def test_frozen_optima_and_ordering():
    g0, q0 = lmg.optimal_coupling(10, 1.0, 0)
    g2, q2 = lmg.optimal_coupling(10, 1.0, 2)
    g4, q4 = lmg.optimal_coupling(10, 1.0, 4)
    npt.assert_allclose([g0, q0], [1.6915094398317931, 8.924054530130588], rtol=1e-6)
    npt.assert_allclose([g2, q2], [1.723853252123697, 11.06211500943165], rtol=1e-6)
    npt.assert_allclose([g4, q4], [2.9866175325336335, 9.490447153104288], rtol=1e-6)
    assert q2 > q0 and q4 > q0
    npt.assert_allclose(lmg.qfi_eigenstate(lmg.LmgParams(10, 1.0, 1.0)), 1.081445596392693, rtol=1e-10)


def test_snr_below_qfi():
    for level in (0, 2, 4):
        for g in (0.5, 1.0, 2.0, 3.0):
            r = lmg.eigenstate_response(lmg.LmgParams(10, 1.0, g), level)
            assert r.snr <= r.qfi + 1e-9


def test_squeezed_fock():
    w, g = 1.0, 0.6
    dxi = 0.25 * (1 / w - 1 / (w - g))
    for n in range(6):
        npt.assert_allclose(lmg.squeezed_fock_qfi(n, w, g), 2 * (n * n + n + 1) * dxi * dxi, rtol=1e-15)
    npt.assert_allclose(lmg.squeezing_parameter(1.0, 0.75), 0.25 * math.log(4))
    with pytest.raises(DomainError):
        lmg.squeezed_fock_qfi(1, 1.0, 1.0)
    with pytest.raises(ValidationError):
        lmg.squeezed_fock_qfi(1.5, 1.0, 0.1)


@given(st.floats(0.5, 2.0), st.floats(0.1, 2.0))
def test_quench_critical_limit(w, t):
    crit = lmg.quench_qfi(w, w, t)
    npt.assert_allclose(crit, w ** 4 * t ** 6 / 18, rtol=1e-14)
    # oscillating branch just below the critical coupling
    near = lmg.quench_qfi(w, w * (1 - 1e-9), t, critical_window=0.0)
    npt.assert_allclose(near, crit, rtol=1e-7)


def test_quench_branches():
    npt.assert_allclose(lmg.quench_qfi(1.0, 1.0, 1.0), 1 / 18)
    # oscillating branch, explicit formula
    w, g, t = 1.0, 0.5, 1.3
    delta = 4 * (1 - g / w)
    y = math.sqrt(delta) * w * t
    npt.assert_allclose(lmg.quench_qfi(w, g, t), 2 / w ** 2 * ((math.sin(y) - y) / (math.sqrt(delta) * delta)) ** 2,
                        rtol=1e-12)
    assert lmg.quench_qfi(1.0, 2.0, 2.0) > lmg.quench_qfi(1.0, 1.0, 2.0)
    with pytest.raises(ValidationError):
        lmg.quench_qfi(1.0, 1.0, -1.0)


def test_quench_photons():
    for t in (0.1, 1.0, 2.5):
        npt.assert_allclose(lmg.quench_photons(1.0, 2.0, t), math.sinh(t) ** 2, rtol=1e-10)
    npt.assert_allclose(lmg.quench_photons(1.0, 1.0, 2.0), 1.0)
    npt.assert_allclose(lmg.quench_photons(1.0, 0.0, 2.0), 0.0)


def test_thermodynamic_scalings():
    static, adiabatic, excited = lmg.thermodynamic_qfi_scalings(1000, 1.0, 0.1)
    npt.assert_allclose(static, 1e4, rtol=1e-12)
    npt.assert_allclose(adiabatic, static, rtol=1e-12)
    npt.assert_allclose(excited, static * 1000 ** (2 / 3) / 6, rtol=1e-12)


def test_validation():
    with pytest.raises(ValidationError):
        lmg.LmgParams(1, 1.0, 1.0)
    with pytest.raises(ValidationError):
        lmg.eigenstate_response(lmg.LmgParams(4, 1.0, 1.0), 5)
