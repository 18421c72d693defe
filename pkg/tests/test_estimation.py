import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, strategies as st

from critmet import estimation as est
from critmet.errors import DomainError, ValidationError


def random_state(rng, d, rank=None):
    rank = d if rank is None else rank
    basis = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
    p = np.zeros(d)
    p[:rank] = rng.dirichlet(np.ones(rank))
    return est.SpectralState(p, basis)


def random_derivative(rng, state):
    d = state.dim
    dp = rng.normal(size=d) * (state.populations > 0)
    dp -= dp.sum() * (state.populations > 0) / max(1, np.count_nonzero(state.populations))
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    ov = 0.5 * (a - a.conj().T)
    return est.StateDerivative(dp, ov)


def test_classical_fisher_binomial():
    p = 0.3
    npt.assert_allclose(est.classical_fisher([p, 1 - p], [1.0, -1.0]), 1 / (p * (1 - p)))
    fi, flag = est.classical_fisher([1.0, 0.0], [0.0, 0.5], return_flag=True)
    assert fi == 0.0 and flag
    with pytest.raises(ValidationError):
        est.classical_fisher([0.5, 0.6], [0, 0])
    with pytest.raises(DomainError):
        est.classical_fisher([1.5, -0.5], [0, 0])


def test_qfi_pure_qubit_phase():
    psi = np.array([1.0, 1.0]) / math.sqrt(2)
    dpsi = np.array([0.0, 1j]) / math.sqrt(2)
    npt.assert_allclose(est.qfi_pure(psi, dpsi), 1.0)
    with pytest.raises(ValidationError):
        est.qfi_pure([1.0, 1.0], [0.0, 0.0])


def test_spectral_matches_sld_trace(rng):
    state = random_state(rng, 4)
    deriv = random_derivative(rng, state)
    _, _, total = est.qfi_spectral(state, deriv)
    l = est.sld_from_derivative(state, deriv)
    rho = state.density_matrix()
    v = state.basis
    drho = v @ deriv.drho_eigenbasis(state.populations) @ v.conj().T
    npt.assert_allclose(0.5 * (l @ rho + rho @ l), drho, atol=1e-12)
    npt.assert_allclose(np.trace(rho @ l @ l).real, total, rtol=1e-10)
    npt.assert_allclose(est.sld(state, drho), l, atol=1e-12)
    m = est.qfim(state, [deriv])
    npt.assert_allclose(m.entries[0, 0], total, rtol=1e-10)


def test_pure_state_embedding_matches_qfi_pure(rng):
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    dpsi = rng.normal(size=3) + 1j * rng.normal(size=3)
    state = est.SpectralState.pure(psi)
    ov = state.basis.conj().T @ dpsi
    full = np.zeros((3, 3), dtype=complex)
    full[:, 0] = ov
    full[0, 1:] = -ov[1:].conj()
    deriv = est.StateDerivative(np.zeros(3), full)
    npt.assert_allclose(est.qfi_spectral(state, deriv)[2], est.qfi_pure(psi, dpsi), rtol=1e-10)


@given(st.integers(0, 10_000))
def test_qfim_psd_and_symmetric(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 3, rank=int(rng.integers(1, 4)))
    derivs = [random_derivative(rng, state) for _ in range(3)]
    m = est.qfim(state, derivs, labels=("a", "b", "c"))
    npt.assert_allclose(m.entries, m.entries.T)
    assert np.linalg.eigvalsh(m.entries)[0] > -1e-10
    assert m["a", "b"] == m.entries[0, 1]


@given(st.integers(0, 10_000))
def test_classical_fisher_below_qfi(seed):
    rng = np.random.default_rng(seed)
    state = random_state(rng, 3)
    deriv = random_derivative(rng, state)
    qfi = est.qfi_spectral(state, deriv)[2]
    # projective measurement in a random basis
    u = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    rho = state.density_matrix()
    drho = state.basis @ deriv.drho_eigenbasis(state.populations) @ state.basis.conj().T
    probs = np.einsum("ik,ij,jk->k", u.conj(), rho, u).real
    dprobs = np.einsum("ik,ij,jk->k", u.conj(), drho, u).real
    assert est.classical_fisher(probs / probs.sum(), dprobs) <= qfi + 1e-9


def test_sld_eigenbasis_is_optimal(rng):
    state = random_state(rng, 3)
    deriv = random_derivative(rng, state)
    l = est.sld_from_derivative(state, deriv)
    _, u = np.linalg.eigh(l)
    rho = state.density_matrix()
    drho = state.basis @ deriv.drho_eigenbasis(state.populations) @ state.basis.conj().T
    probs = np.einsum("ik,ij,jk->k", u.conj(), rho, u).real
    dprobs = np.einsum("ik,ij,jk->k", u.conj(), drho, u).real
    npt.assert_allclose(est.classical_fisher(probs, dprobs), est.qfi_spectral(state, deriv)[2], rtol=1e-9)


def test_validation():
    with pytest.raises(ValidationError):
        est.SpectralState([0.5, 0.6], np.eye(2))
    with pytest.raises(ValidationError):
        est.SpectralState([0.5, 0.5], np.ones((2, 2)))
    with pytest.raises(ValidationError):
        est.StateDerivative([0.1, 0.1], np.zeros((2, 2)))
    with pytest.raises(ValidationError):
        est.StateDerivative([0.0, 0.0], np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValidationError):
        est.FisherMatrix(("a", "b"), np.diag([1.0, -1.0]))


def test_sld_kernel_weight_raises():
    # a population flowing between two empty levels is invisible to rho
    state = est.SpectralState([1.0, 0.0, 0.0], np.eye(3))
    with pytest.raises(DomainError):
        est.sld(state, np.diag([0.0, 0.5, -0.5]))


def test_snr_and_effective_variance():
    npt.assert_allclose(est.snr(2.0, 4.0, repetitions=3), 3.0)
    with pytest.raises(DomainError):
        est.snr(1.0, 0.0)
    with pytest.raises(ValidationError):
        est.snr(1.0, 1.0, repetitions=0)
    npt.assert_allclose(est.effective_variance(np.eye(2), [1.0, 2.0]), 5.0)


def test_zero_modes_and_pseudoinverse():
    m = est.FisherMatrix(("w", "g"), np.array([[1.0, -1.0], [-1.0, 1.0]]) / 4)
    modes = est.qfim_zero_modes(m)
    assert len(modes) == 1
    npt.assert_allclose(np.abs(modes[0][1]), [1 / math.sqrt(2)] * 2)
    npt.assert_allclose(est.pseudoinverse_qfim(m), [[1, -1], [-1, 1]], atol=1e-12)
    npt.assert_allclose(m.det, 0.0, atol=1e-15)


def test_quantumness_commuting_and_singular(rng):
    state = random_state(rng, 2)
    z = np.diag([1.0, -1.0])
    assert est.quantumness_r(state, [z, 2 * z], np.eye(2)) == 0.0
    with pytest.raises(DomainError):
        est.quantumness_r(state, [z, z], np.zeros((2, 2)))


def test_gibbs_derivative_against_finite_difference():
    h0 = np.array([[0.3, 0.2, 0.0], [0.2, -0.1, 0.4], [0.0, 0.4, 0.9]])
    dh = np.diag([1.0, 0.0, -1.0]) + 0.1
    t = 0.7

    def rho(x):
        e, v = np.linalg.eigh(h0 + x * dh)
        return est.gibbs_state(e, v, t).density_matrix()

    e, v = np.linalg.eigh(h0)
    state, deriv = est.gibbs_derivative(e, v, dh, t)
    drho = state.basis @ deriv.drho_eigenbasis(state.populations) @ state.basis.conj().T
    fd = (rho(1e-5) - rho(-1e-5)) / 2e-5
    npt.assert_allclose(drho, fd, atol=1e-8)
    with pytest.raises(DomainError):
        est.gibbs_state(e, v, 0.0)
    with pytest.raises(DomainError):
        est.gibbs_derivative(np.zeros(2), np.eye(2), np.eye(2), 1.0)
