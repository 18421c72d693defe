"""Parametrically pumped Kerr resonator in the Gaussian (vanishing Kerr) limit.

In the frame rotating at half the pump frequency the quadratures obey
d(x, p)/dt = M (x, p) + noise with

    M = [[-damping, detuning - pump], [-(detuning + pump), -damping]],

so the covariance (vacuum = identity) follows the Lyapunov equation
dS/dt = M S + S M^T + 2 damping I.  The normal phase requires
pump < critical_pump = sqrt(detuning^2 + damping^2).  The estimated
parameter is the detuning, evaluated at its prior value.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, ValidationError
from .gaussian import GaussianDerivative, GaussianState, homodyne_fi_optimal, qfi_gaussian

EXCEPTIONAL_TOL = 1e-8
DRIFT_DERIVATIVE = np.array([[0.0, 2.0, 0.0], [-1.0, 0.0, 1.0], [0.0, -2.0, 0.0]])


@dataclass(frozen=True)
class KerrParams:
    detuning: float
    pump: float
    damping: float
    n_max: float = None

    def __post_init__(self):
        if self.damping < 0:
            raise ValidationError("damping must be non-negative")
        if self.pump < 0:
            raise ValidationError("pump must be non-negative")
        if self.n_max is not None and self.n_max < 1:
            raise ValidationError("n_max must be at least 1")


@dataclass(frozen=True)
class HomodyneCheck:
    angle: float
    fisher: float
    qfi: float

    @property
    def ratio(self):
        return self.fisher / self.qfi if self.qfi > 0 else 1.0


@dataclass(frozen=True)
class OptimalProtocol:
    pump: float
    time: float
    qfi_single: float
    qfi_rate: float
    qfi_single_asymptotic: float


def critical_pump(p):
    return math.hypot(p.detuning, p.damping)


def _below_threshold(p, margin=0.0):
    """Check the normal phase; returns critical_pump^2, formed without a square root."""
    ec = critical_pump(p)
    if p.pump >= ec * (1.0 - margin):
        raise DomainError(f"pump {p.pump:.6g} is at or above the critical value {ec:.6g}")
    return p.detuning ** 2 + p.damping ** 2


def drift_matrix(p):
    w, e, d = p.detuning, p.pump, p.damping
    return np.array([[-d, w - e], [-(w + e), -d]])


def eigenvalues(p):
    """lambda_{+,-} = damping +- sqrt(pump^2 - detuning^2), complex below the exceptional point."""
    root = np.sqrt(complex(p.pump ** 2 - p.detuning ** 2))
    return p.damping + root, p.damping - root


def steady_state(p):
    ec2 = _below_threshold(p)
    w, e, d = p.detuning, p.pump, p.damping
    den = ec2 - e * e
    cov = np.array([[ec2 - w * e, -d * e], [-d * e, ec2 + w * e]]) / den
    return GaussianState(np.zeros(2), cov)


def steady_state_derivative(p):
    """d Sigma_ss / d detuning from the closed form."""
    ec2 = _below_threshold(p)
    w, e = p.detuning, p.pump
    den = ec2 - e * e
    cov = steady_state(p).covariance
    dnum = np.diag([2 * w - e, 2 * w + e])
    return GaussianDerivative(np.zeros(2), dnum / den - cov * (2 * w / den))


def steady_photons(p):
    """N_ss = pump^2 / (2 (critical_pump^2 - pump^2))."""
    ec2 = _below_threshold(p)
    return p.pump ** 2 / (2.0 * (ec2 - p.pump ** 2))


def qfi_steady(p):
    """[2 N_ss + 8 detuning^2 N_ss^2 / pump^2] / (2 critical_pump^2 - pump^2)."""
    ec2 = _below_threshold(p)
    n = steady_photons(p)
    if p.pump == 0:
        return 0.0
    return (2 * n + 8 * p.detuning ** 2 * n * n / p.pump ** 2) / (2 * ec2 - p.pump ** 2)


def qfi_steady_gaussian(p):
    """Steady-state QFI from the general Gaussian formula (independent route)."""
    return qfi_gaussian(steady_state(p), steady_state_derivative(p))


def homodyne_steady_closed_form(p, phi):
    """Printed steady-state homodyne Fisher information at quadrature angle phi."""
    ec2 = _below_threshold(p)
    w, e, d = p.detuning, p.pump, p.damping
    c2, s2 = math.cos(2 * phi), math.sin(2 * phi)
    num = e * e * ((d * d - w * w - e * e) * c2 + 2 * w * e + 2 * w * d * s2) ** 2
    den = 2 * (ec2 - e * e) ** 2 * (ec2 - e * (w * c2 - d * s2)) ** 2
    return num / den


def _lyapunov_generator(m):
    return np.array([[2 * m[0, 0], 2 * m[0, 1], 0.0],
                     [m[1, 0], m[0, 0] + m[1, 1], m[0, 1]],
                     [0.0, 2 * m[1, 0], 2 * m[1, 1]]])


def _to_matrix(v):
    return np.array([[v[0], v[1]], [v[1], v[2]]])


def dynamics(p, t):
    """Covariance and its detuning derivative at time t, starting from vacuum.

    The linear Lyapunov system and its parameter derivative are integrated
    exactly with one matrix exponential of the augmented 7x7 generator.
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    _below_threshold(p, margin=1e-9)
    gen = _lyapunov_generator(drift_matrix(p))
    big = np.zeros((7, 7))
    big[:3, :3] = gen
    big[3:6, 3:6] = gen
    big[3:6, :3] = DRIFT_DERIVATIVE
    big[:3, 6] = [2 * p.damping, 0.0, 2 * p.damping]
    start = np.array([1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])
    out = expm(big * t) @ start
    cov = _to_matrix(out[:3])
    return GaussianState(np.zeros(2), cov), GaussianDerivative(np.zeros(2), _to_matrix(out[3:6]))


def dynamics_covariance(p, t):
    return dynamics(p, t)[0]


def lyapunov_rhs(p, cov):
    m = drift_matrix(p)
    return m @ cov + cov @ m.T + 2 * p.damping * np.eye(2)


def photon_number_t(p, t):
    """Photon number N(t) from vacuum: oscillating (pump < detuning) or growing branch."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    ec2 = _below_threshold(p)
    w, e, d = abs(p.detuning), p.pump, p.damping
    scale = e * e / (2.0 * (ec2 - e * e))
    if abs(e - w) <= EXCEPTIONAL_TOL * max(w, 1e-300):
        # cosh(x) + d t sinh(x)/(x/2) to second order in x^2 = 4 (pump^2 - detuning^2) t^2
        x2 = 4.0 * (e * e - w * w) * t * t
        bracket = 1.0 + x2 / 2 + x2 * x2 / 24 + 2 * d * t * (1.0 + x2 / 6 + x2 * x2 / 120)
        return scale * (1.0 - math.exp(-2 * d * t) * bracket)
    if e < w:
        nu = math.sqrt(w * w - e * e)
        return scale * (1.0 - math.exp(-2 * d * t) * (math.cos(2 * nu * t) + d / nu * math.sin(2 * nu * t)))
    root = math.sqrt(e * e - w * w)
    lp, lm = d + root, d - root
    # continuation of the oscillating branch; each exponential carries a factor 1/2
    return scale * (1.0 - 0.5 * (d / root + 1.0) * math.exp(-2 * lm * t)
                    + 0.5 * (d / root - 1.0) * math.exp(-2 * lp * t))


def photon_number_unitary(p, t):
    """Damping-free N(t) = pump^2 sin^2(nu t) / nu^2 with nu^2 = detuning^2 - pump^2."""
    nu2 = p.detuning ** 2 - p.pump ** 2
    u = nu2 * t * t
    if abs(u) < 1e-10:
        return p.pump ** 2 * t * t * (1.0 - u / 3.0)
    if u > 0:
        return p.pump ** 2 * math.sin(math.sqrt(nu2) * t) ** 2 / nu2
    return p.pump ** 2 * math.sinh(math.sqrt(-nu2) * t) ** 2 / -nu2


def unitary_covariance(p, t):
    """Damping-free closed-form covariance (pump < detuning)."""
    w, e = p.detuning, p.pump
    nu = math.sqrt(w * w - e * e)
    c, s = math.cos(2 * t * nu), math.sin(2 * t * nu)
    # off-diagonal starts negative: dS_xp/dt = -2 pump at t = 0
    return np.array([[(w + e * c) / (e + w), -e * s / nu], [-e * s / nu, (-w + e * c) / (e - w)]])


def qfi_dynamic(p, t):
    if t == 0:
        return 0.0
    return qfi_gaussian(*dynamics(p, t))


def unitary_scaling_reference(n_photons, t):
    """[2 N + (8/9) N^2] t^2."""
    return (2.0 * n_photons + 8.0 / 9.0 * n_photons ** 2) * t * t


def homodyne_check(p, t=None, grid_points=64):
    """Best homodyne Fisher information against the QFI, at time t or in the steady state."""
    if t is None:
        state, deriv = steady_state(p), steady_state_derivative(p)
    else:
        state, deriv = dynamics(p, t)
    if not np.any(deriv.dcovariance) and not np.any(deriv.dmean):
        return HomodyneCheck(0.0, 0.0, 0.0)
    phi, fi = homodyne_fi_optimal(state, deriv, grid_points=grid_points)
    return HomodyneCheck(phi, fi, qfi_gaussian(state, deriv))


def optimal_pump(n_max, critical):
    """Pump at which the steady state holds exactly n_max photons."""
    return math.sqrt(2.0 * n_max / (1.0 + 2.0 * n_max)) * critical


def optimal_time(n_max, damping):
    return (1.0 + 2 * n_max + math.sqrt(2 * n_max * (1.0 + 2 * n_max))) / (2.0 * damping)


def optimal_protocol(p):
    """Photon-capped optimum with detuning = damping.

    Returns the optimal pump, measurement time, single-shot steady QFI,
    QFI per unit time and the asymptotic 2 n_max^2 / damping^2.
    """
    if p.n_max is None:
        raise ValidationError("optimal_protocol needs n_max")
    if p.damping <= 0:
        raise DomainError("optimal protocol needs damping > 0")
    if not math.isclose(p.detuning, p.damping, rel_tol=1e-12):
        raise DomainError("optimal protocol assumes detuning = damping")
    e_opt = optimal_pump(p.n_max, critical_pump(p))
    t_opt = optimal_time(p.n_max, p.damping)
    single = qfi_steady(KerrParams(p.detuning, e_opt, p.damping, p.n_max))
    return OptimalProtocol(e_opt, t_opt, single, single / t_opt, 2.0 * p.n_max ** 2 / p.damping ** 2)
