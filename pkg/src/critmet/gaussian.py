"""Single-mode Gaussian states: purity, QFI and homodyne Fisher information.

Conventions: x = (a + a^dag)/sqrt2, p = -i(a - a^dag)/sqrt2, and the
covariance carries an explicit factor 2 so that the vacuum has sigma = I.
The homodyne quadrature is x(phi) = cos(phi) x - sin(phi) p, whose variance
(in the same factor-2 units) is

    S(phi) = cos^2 phi s11 + sin^2 phi s22 - sin(2 phi) s12.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import grid_then_golden_max

PURE_THRESHOLD = 1e-9


def _sym2(m, name):
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ValidationError(f"{name} must be 2x2")
    if abs(m[0, 1] - m[1, 0]) > 1e-12 * max(1.0, np.max(np.abs(m))):
        raise ValidationError(f"{name} must be symmetric")
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.mean, dtype=float).reshape(2)
        s = _sym2(self.covariance, "covariance")
        if np.linalg.det(s) < 1.0 - 1e-9 or s[0, 0] <= 0:
            raise DomainError(f"unphysical covariance (det = {np.linalg.det(s):.6g} < 1)")
        object.__setattr__(self, "mean", v)
        object.__setattr__(self, "covariance", s)

    @classmethod
    def vacuum(cls):
        return cls(np.zeros(2), np.eye(2))

    @property
    def photon_number(self):
        """<a^dag a> = (Tr sigma - 2)/4 + |v|^2 / 2."""
        return float((np.trace(self.covariance) - 2.0) / 4.0 + 0.5 * self.mean @ self.mean)


@dataclass(frozen=True)
class GaussianDerivative:
    dmean: np.ndarray
    dcovariance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dmean", np.asarray(self.dmean, dtype=float).reshape(2))
        object.__setattr__(self, "dcovariance", _sym2(self.dcovariance, "dcovariance"))


def purity(state):
    """mu = 1 / sqrt(det sigma)."""
    det = np.linalg.det(state.covariance)
    if det <= 0:
        raise DomainError("covariance determinant must be positive")
    return float(1.0 / np.sqrt(det))


def qfi_gaussian(state, deriv):
    """QFI of a single-mode Gaussian manifold.

    (1/2) Tr[(S^-1 dS)^2] / (1 + mu^2) + 2 (dmu)^2 / (1 - mu^4) + 2 dv^T S^-1 dv,
    with the middle term dropped on pure manifolds (mu = 1, dmu = 0).
    """
    s_inv = np.linalg.inv(state.covariance)
    a = s_inv @ deriv.dcovariance
    mu = purity(state)
    dmu = -0.5 * mu * np.trace(a)
    term_cov = 0.5 * np.trace(a @ a) / (1.0 + mu * mu)
    if mu >= 1.0 - PURE_THRESHOLD:
        if abs(dmu) > 1e-6:
            raise DomainError("pure state with changing purity: inconsistent manifold")
        term_mu = 0.0
    else:
        term_mu = 2.0 * dmu * dmu / (1.0 - mu ** 4)
    term_mean = 2.0 * deriv.dmean @ s_inv @ deriv.dmean
    return float(term_cov + term_mu + term_mean)


def quadrature_variance(covariance, phi):
    c, s = np.cos(phi), np.sin(phi)
    return c * c * covariance[0, 0] + s * s * covariance[1, 1] - 2.0 * s * c * covariance[0, 1]


def homodyne_fi(state, deriv, phi):
    """Fisher information of a homodyne measurement of x(phi)."""
    sv = quadrature_variance(state.covariance, phi)
    if sv <= 0:
        raise DomainError("quadrature variance must be positive")
    dsv = quadrature_variance(deriv.dcovariance, phi)
    dmean = np.cos(phi) * deriv.dmean[0] - np.sin(phi) * deriv.dmean[1]
    return float((4.0 * sv * dmean ** 2 + dsv ** 2) / (2.0 * sv * sv))


def homodyne_fi_optimal(state, deriv, grid_points=64):
    """Best quadrature angle in [0, pi): coarse grid then golden section.

    Returns (phi_star, fi).  A flat profile returns phi = 0.
    """
    if grid_points < 8:
        raise ValidationError("grid_points must be at least 8")
    return grid_then_golden_max(lambda phi: homodyne_fi(state, deriv, phi), 0.0, np.pi,
                                grid_points=grid_points, tol=1e-10, periodic=True)


def rotate(state, deriv, angle):
    """Apply a fixed phase-space rotation to a state and its derivative."""
    c, s = np.cos(angle), np.sin(angle)
    r = np.array([[c, -s], [s, c]])
    return (GaussianState(r @ state.mean, r @ state.covariance @ r.T),
            GaussianDerivative(r @ deriv.dmean, r @ deriv.dcovariance @ r.T))
