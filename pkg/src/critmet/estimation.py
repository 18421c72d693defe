"""Estimation-theory core.

Classical Fisher information, quantum Fisher information (pure and mixed),
symmetric logarithmic derivatives, the QFI matrix, SLD compatibility
diagnostics and the tools needed when the QFI matrix is singular.

Mixed states are handled in their eigenbasis (`SpectralState`); parameter
derivatives are passed as population derivatives plus basis overlaps
(`StateDerivative`), which is how the model modules supply them
analytically.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import check_symmetric, eigh_symmetric, pseudoinverse_psd

PROB_FLOOR = 1e-14


@dataclass(frozen=True)
class SpectralState:
    """Density operator rho = sum_i p_i |psi_i><psi_i| (basis as columns)."""

    populations: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float)
        v = np.asarray(self.basis, dtype=complex)
        if v.ndim != 2 or v.shape[1] != p.size:
            raise ValidationError("basis must have one column per population")
        if np.any(p < -1e-12):
            raise ValidationError("populations must be non-negative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValidationError(f"populations sum to {p.sum():.12g}, expected 1")
        if np.max(np.abs(v.conj().T @ v - np.eye(p.size))) > 1e-10:
            raise ValidationError("basis is not orthonormal")
        object.__setattr__(self, "populations", p)
        object.__setattr__(self, "basis", v)

    @property
    def dim(self):
        return self.populations.size

    def density_matrix(self):
        v = self.basis
        return (v * self.populations) @ v.conj().T

    @classmethod
    def pure(cls, psi):
        """Embed a pure state in a full orthonormal basis (psi first)."""
        psi = np.asarray(psi, dtype=complex)
        d = psi.size
        # QR of [psi | I] gives an orthonormal completion whose first column is psi up to a phase
        basis = np.linalg.qr(np.column_stack([psi, np.eye(d, dtype=complex)]))[0][:, :d]
        basis[:, 0] = psi
        pops = np.zeros(d)
        pops[0] = 1.0
        return cls(pops, basis)


@dataclass(frozen=True)
class StateDerivative:
    """Derivative of a SpectralState along one parameter.

    overlaps[m, n] = <psi_m | d psi_n>; diagonal entries are gauge and ignored.
    """

    dpopulations: np.ndarray
    overlaps: np.ndarray

    def __post_init__(self):
        dp = np.asarray(self.dpopulations, dtype=float)
        ov = np.asarray(self.overlaps, dtype=complex)
        if ov.shape != (dp.size, dp.size):
            raise ValidationError("overlaps must be square with one row per population")
        if abs(dp.sum()) > 1e-10:
            raise ValidationError("population derivatives must sum to zero")
        off = ov - np.diag(np.diag(ov))
        scale = max(1.0, np.max(np.abs(off), initial=0.0))
        if np.max(np.abs(off + off.conj().T), initial=0.0) > 1e-10 * scale:
            raise ValidationError("overlap matrix is not anti-Hermitian off the diagonal")
        object.__setattr__(self, "dpopulations", dp)
        object.__setattr__(self, "overlaps", ov)

    def drho_eigenbasis(self, populations):
        """Matrix elements <psi_m| d rho |psi_n> in the state's eigenbasis."""
        p = np.asarray(populations, dtype=float)
        ov = self.overlaps - np.diag(np.diag(self.overlaps))
        # d rho = sum dp |n><n| + p_n (|dn><n| + |n><dn|)
        return np.diag(self.dpopulations) + ov * p[None, :] - p[:, None] * ov


@dataclass(frozen=True)
class FisherMatrix:
    labels: tuple
    entries: np.ndarray = field(repr=True)

    def __post_init__(self):
        m = check_symmetric(np.atleast_2d(np.asarray(self.entries, dtype=float)), tol=1e-9)
        m = 0.5 * (m + m.T)
        if len(self.labels) != m.shape[0]:
            raise ValidationError("one label per parameter required")
        lam = np.linalg.eigvalsh(m)
        if lam[0] < -1e-10 * max(1.0, abs(lam[-1])):
            raise ValidationError(f"Fisher matrix is not PSD (eigenvalue {lam[0]:.3e})")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "entries", m)

    def __getitem__(self, key):
        i, j = (self.labels.index(k) if isinstance(k, str) else k for k in key)
        return self.entries[i, j]

    @property
    def det(self):
        return float(np.linalg.det(self.entries))


def classical_fisher(probs, dprobs, floor=PROB_FLOOR, return_flag=False):
    """Fisher information sum_i dp_i^2 / p_i of an outcome distribution.

    Outcomes with p_i <= floor are skipped; if any of them still carries a
    derivative above 1e-8 the divergence flag is set.
    """
    p = np.asarray(probs, dtype=float)
    dp = np.asarray(dprobs, dtype=float)
    if p.shape != dp.shape:
        raise ValidationError("probs and dprobs must have the same length")
    if np.any(p < 0):
        raise DomainError("negative probability")
    if abs(p.sum() - 1.0) > 1e-8:
        raise ValidationError(f"probabilities sum to {p.sum():.10g}")
    keep = p > floor
    fi = float(np.sum(dp[keep] ** 2 / p[keep]))
    diverging = bool(np.any(np.abs(dp[~keep]) > 1e-8))
    return (fi, diverging) if return_flag else fi


def qfi_pure(psi, dpsi):
    """4 (<dpsi|dpsi> - |<psi|dpsi>|^2) for a normalised pure state."""
    psi = np.asarray(psi, dtype=complex).ravel()
    dpsi = np.asarray(dpsi, dtype=complex).ravel()
    if psi.shape != dpsi.shape:
        raise ValidationError("psi and dpsi must have the same length")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValidationError("psi is not normalised")
    return float(4.0 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2))


def _check_pair(state, deriv):
    if deriv.dpopulations.size != state.dim:
        raise ValidationError("derivative dimension does not match the state")


def qfi_spectral(state, deriv, floor=PROB_FLOOR):
    """Population and basis contributions to the QFI of a mixed state.

    Returns (population_term, basis_term, total).
    """
    _check_pair(state, deriv)
    p = state.populations
    dp = deriv.dpopulations
    keep = p > floor
    pop = float(np.sum(dp[keep] ** 2 / p[keep]))
    psum = p[:, None] + p[None, :]
    sigma = np.where(psum > floor, (p[:, None] - p[None, :]) ** 2 / np.where(psum > floor, psum, 1.0), 0.0)
    np.fill_diagonal(sigma, 0.0)
    # sigma is symmetric; overlaps[m, n] pairs with sigma[n, m]
    basis = float(2.0 * np.sum(sigma * np.abs(deriv.overlaps) ** 2))
    return pop, basis, pop + basis


def _sld_eigenbasis(p, drho_eb, floor):
    psum = p[:, None] + p[None, :]
    supported = psum > floor
    if np.any(np.abs(drho_eb[~supported]) > 1e-8):
        raise DomainError("d rho has weight on the kernel of rho; the SLD is undefined there")
    return np.where(supported, 2.0 * drho_eb / np.where(supported, psum, 1.0), 0.0)


def sld(state, drho, floor=PROB_FLOOR):
    """Symmetric logarithmic derivative for a given d rho (ambient basis)."""
    drho = np.asarray(drho, dtype=complex)
    if drho.shape != (state.basis.shape[0],) * 2:
        raise ValidationError("drho has the wrong shape")
    if np.max(np.abs(drho - drho.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(drho))):
        raise ValidationError("drho must be Hermitian")
    if abs(np.trace(drho)) > 1e-10:
        raise ValidationError("drho must be traceless")
    v = state.basis
    l_eb = _sld_eigenbasis(state.populations, v.conj().T @ drho @ v, floor)
    out = v @ l_eb @ v.conj().T
    return 0.5 * (out + out.conj().T)


def sld_from_derivative(state, deriv, floor=PROB_FLOOR):
    """SLD built directly from a StateDerivative."""
    _check_pair(state, deriv)
    drho = deriv.drho_eigenbasis(state.populations)
    v = state.basis
    out = v @ _sld_eigenbasis(state.populations, drho, floor) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def qfim(state, derivs, labels=None, floor=PROB_FLOOR):
    """QFI matrix I_ij = sum_{kl} 2 Re(D^i_kl D^j_lk) / (p_k + p_l)."""
    derivs = list(derivs)
    if not derivs:
        raise ValidationError("at least one derivative is required")
    for d in derivs:
        _check_pair(state, d)
    p = state.populations
    psum = p[:, None] + p[None, :]
    w = np.where(psum > floor, 2.0 / np.where(psum > floor, psum, 1.0), 0.0)
    ds = [d.drho_eigenbasis(p) for d in derivs]
    n = len(ds)
    m = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            m[i, j] = m[j, i] = np.sum(w * (ds[i] * ds[j].T).real)
    if labels is None:
        labels = tuple(f"theta{i}" for i in range(n))
    return FisherMatrix(tuple(labels), m)


def compatibility_trace(state, l1, l2):
    """Im Tr(rho [L1, L2]); zero when the two SLDs are weakly compatible."""
    rho = state.density_matrix()
    l1 = np.asarray(l1, dtype=complex)
    l2 = np.asarray(l2, dtype=complex)
    if l1.shape != rho.shape or l2.shape != rho.shape:
        raise ValidationError("operator dimensions do not match the state")
    return float(np.trace(rho @ (l1 @ l2 - l2 @ l1)).imag)


def quantumness_r(state, slds, fisher):
    """Quantumness parameter R of a multiparameter model.

    R is the largest eigenvalue modulus of D I^-1, where
    D_ij = Tr(rho [L_i, L_j]) / 2.  It lies in [0, 1]; zero means the
    multiparameter bound is attainable.
    """
    m = fisher.entries if isinstance(fisher, FisherMatrix) else np.asarray(fisher, dtype=float)
    lam = np.linalg.eigvalsh(m)
    if lam[0] <= 1e-10 * lam[-1]:
        raise DomainError("QFI matrix is singular; inspect it with qfim_zero_modes")
    slds = list(slds)
    n = len(slds)
    if n != m.shape[0]:
        raise ValidationError("one SLD per parameter required")
    d = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = 0.5j * compatibility_trace(state, slds[i], slds[j])
            d[j, i] = -d[i, j]
    return float(np.max(np.abs(np.linalg.eigvals(d @ np.linalg.inv(m)))))


def snr(dsignal, variance, repetitions=1):
    """Error-propagation signal-to-noise ratio M * (d<O>)^2 / Var(O)."""
    if variance <= 0:
        raise DomainError("variance must be positive")
    if int(repetitions) != repetitions or repetitions < 1:
        raise ValidationError("repetitions must be a positive integer")
    return float(repetitions * dsignal ** 2 / variance)


def qfim_zero_modes(fisher, tol=1e-10):
    """Eigenpairs of the QFI matrix whose eigenvalue is below tol * max."""
    m = fisher.entries if isinstance(fisher, FisherMatrix) else fisher
    es = eigh_symmetric(m)
    top = max(abs(es.values[-1]), 0.0)
    return [(float(es.values[k]), es.vectors[:, k].copy())
            for k in range(es.values.size) if es.values[k] <= tol * top]


def pseudoinverse_qfim(fisher, rank_tol=1e-10):
    m = fisher.entries if isinstance(fisher, FisherMatrix) else fisher
    return pseudoinverse_psd(m, rank_tol)


def effective_variance(pinv_qfim, jacobian):
    """Linearised error propagation J C J^T for a derived parameter."""
    c = np.asarray(pinv_qfim, dtype=float)
    j = np.asarray(jacobian, dtype=float).ravel()
    if c.shape != (j.size, j.size):
        raise ValidationError("jacobian length must match the matrix dimension")
    return float(j @ c @ j)


def gibbs_state(energies, vectors, temperature):
    """Thermal SpectralState exp(-H/T)/Z from an eigendecomposition."""
    e = np.asarray(energies, dtype=float)
    if temperature <= 0:
        raise DomainError("temperature must be positive")
    w = np.exp(-(e - e.min()) / temperature)
    return SpectralState(w / w.sum(), vectors)


def gibbs_derivative(energies, vectors, dh, temperature, degeneracy_tol=1e-12):
    """StateDerivative of a Gibbs state for H -> H + d(theta) * dH.

    Uses Hellmann-Feynman for level shifts and first-order perturbation
    theory for the eigenvectors; exact for non-degenerate spectra.
    """
    e = np.asarray(energies, dtype=float)
    v = np.asarray(vectors, dtype=complex)
    state = gibbs_state(e, v, temperature)
    p = state.populations
    dh_eb = v.conj().T @ np.asarray(dh, dtype=complex) @ v
    de = dh_eb.diagonal().real
    dp = -p * (de - np.dot(p, de)) / temperature
    gaps = e[None, :] - e[:, None]  # E_n - E_m at [m, n]
    np.fill_diagonal(gaps, 1.0)
    if np.any(np.abs(gaps) < degeneracy_tol):
        raise DomainError("degenerate spectrum; perturbative eigenvector derivative is undefined")
    ov = dh_eb / gaps
    np.fill_diagonal(ov, 0.0)
    return state, StateDerivative(dp, ov)
