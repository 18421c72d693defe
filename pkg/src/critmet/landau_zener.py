"""Two-level (Landau-Zener) sensor at zero and finite temperature.

H = (omega/2) sz - (coupling/2) sx with gap Delta = sqrt(omega^2 + coupling^2).
States are written in the basis (|down>, |up>), so sz = diag(-1, 1).  The
ground state is cos(phi/2)|down> + sin(phi/2)|up> with tan(phi) = coupling/omega.
Thermal quantities use k_B = 1 and the shorthand x = Delta / 2T.

Parameters are ordered (omega, coupling) in every matrix.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .estimation import (FisherMatrix, SpectralState, StateDerivative, compatibility_trace,
                         effective_variance, pseudoinverse_qfim)
from .numerics import eigh_symmetric

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
LABELS = ("omega", "coupling")


@dataclass(frozen=True)
class LzParams:
    omega: float
    coupling: float
    temperature: float = 0.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValidationError("temperature must be non-negative")

    @property
    def gap(self):
        return math.hypot(self.omega, self.coupling)


@dataclass(frozen=True)
class LzThermalQfi:
    population_term: float
    weight: float
    ground_qfi: float
    total: float


@dataclass(frozen=True)
class SldPair:
    l_omega: np.ndarray
    l_coupling: np.ndarray
    commutator_coeff: float
    weak_trace: float


def _gap(p):
    d = p.gap
    if d == 0:
        raise DomainError("omega = coupling = 0 is an exact level crossing")
    return d


def _thermal(p):
    if p.temperature <= 0:
        raise DomainError("finite-temperature formula needs T > 0; use the ground-state function")
    d = _gap(p)
    return d, d / (2.0 * p.temperature)


def _sech2(x):
    return 1.0 / math.cosh(x) ** 2 if abs(x) < 350 else 0.0


def hamiltonian(p):
    return 0.5 * p.omega * SIGMA_Z.real - 0.5 * p.coupling * SIGMA_X.real


def ground_state(p):
    """Mixing angle phi and ground-state vector from 2x2 diagonalisation."""
    _gap(p)
    es = eigh_symmetric(hamiltonian(p))
    v = es.vectors[:, 0]
    return 2.0 * math.atan2(v[1], v[0]), v.astype(complex)


def mixing_angle_derivatives(p):
    """(d phi/d omega, d phi/d coupling) = (-coupling, omega) / Delta^2."""
    d2 = _gap(p) ** 2
    return -p.coupling / d2, p.omega / d2


def ground_state_derivative(p, wrt="omega"):
    """Analytic derivative of the ground-state vector."""
    phi, _ = ground_state(p)
    dphi = dict(zip(LABELS, mixing_angle_derivatives(p)))[wrt]
    return 0.5 * dphi * np.array([-math.sin(phi / 2), math.cos(phi / 2)], dtype=complex)


def qfi_ground(p):
    """coupling^2 / Delta^4."""
    _gap(p)
    return p.coupling ** 2 / (p.omega ** 2 + p.coupling ** 2) ** 2


def qfi_thermal(p):
    """Population and coherent parts of the Gibbs-state QFI for omega."""
    d, x = _thermal(p)
    pop = p.omega ** 2 * _sech2(x) / (4.0 * p.temperature ** 2 * d * d)
    w = math.tanh(x) ** 2
    gs = qfi_ground(p)
    return LzThermalQfi(pop, w, gs, pop + w * gs)


def sigmaz_moments(p):
    """<sz>, Var(sz) and d<sz>/d omega for the Gibbs (or ground) state."""
    d = _gap(p)
    if p.temperature == 0:
        th, dth = 1.0, 0.0
    else:
        x = d / (2.0 * p.temperature)
        th, dth = math.tanh(x), _sech2(x) * p.omega / (2.0 * p.temperature * d)
    mean = -p.omega / d * th
    dmean = -(p.coupling ** 2 / d ** 3) * th - (p.omega / d) * dth
    return mean, 1.0 - mean * mean, dmean


def snr_sigmaz(p):
    """Zero-temperature SNR of an sz readout; equals coupling^2 / Delta^4."""
    d = _gap(p)
    return p.coupling ** 2 / d ** 4


def snr_sigmaz_thermal(p):
    """Finite-temperature SNR of an sz readout (closed form).

    The printed sech/sinh/cosh expression is evaluated with y = exp(-Delta/T)
    so that it stays finite at very low temperature.
    """
    d, x = _thermal(p)
    t = p.temperature
    y = math.exp(-2.0 * x)
    g2, w2 = p.coupling ** 2, p.omega ** 2
    num = (2.0 * y * w2 * d + g2 * t * (1.0 - y * y)) ** 2
    den = (1.0 + y) ** 2 * t * t * d ** 4 * (2.0 * y * (g2 + 2.0 * w2) + g2 * (1.0 + y * y))
    return num / den


def snr_ramsey(p, omega_l, t):
    """Ramsey SNR t^2 omega^2 cos^2(detuning t) / Delta^2 with detuning = omega_l - Delta."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    d = _gap(p)
    return t * t * p.omega ** 2 * math.cos((omega_l - d) * t) ** 2 / d ** 2


def qfim_ground(p):
    d4 = _gap(p) ** 4
    w, g = p.omega, p.coupling
    return FisherMatrix(LABELS, np.array([[g * g, -g * w], [-g * w, w * w]]) / d4)


def thermal_determinant(p):
    """4 csch^4(Delta/T) sinh^6(Delta/2T) / (T^2 Delta^2), written overflow-free."""
    d, x = _thermal(p)
    # csch^4(2x) sinh^6(x) = sinh^2(x) / (16 cosh^4(x))
    return math.tanh(x) ** 2 * _sech2(x) / (4.0 * p.temperature ** 2 * d * d)


def qfim_thermal(p):
    """Gibbs-state QFI matrix and its closed-form determinant."""
    d, x = _thermal(p)
    t2 = p.temperature ** 2
    s2 = _sech2(x)
    w, g = p.omega, p.coupling
    d2, d4 = d * d, d ** 4
    iww = ((d2 * w * w - 4 * g * g * t2) * s2 + 4 * g * g * t2) / (4 * t2 * d4)
    igg = ((d2 * g * g - 4 * w * w * t2) * s2 + 4 * w * w * t2) / (4 * t2 * d4)
    iwg = g * w * ((d2 + 4 * t2) * s2 - 4 * t2) / (4 * t2 * d4)
    return FisherMatrix(LABELS, np.array([[iww, iwg], [iwg, igg]])), thermal_determinant(p)


def multiparameter_qfi(p):
    """Effective QFI for omega when coupling is also unknown: det / I_gg."""
    m, det = qfim_thermal(p)
    return det / m.entries[1, 1]


def gibbs_state(p):
    """Gibbs state in its eigenbasis (ground first) with analytic derivatives."""
    d, x = _thermal(p)
    phi, ground = ground_state(p)
    excited = np.array([-math.sin(phi / 2), math.cos(phi / 2)], dtype=complex)
    # Boltzmann weights from exp(-2x) directly; (1 - tanh x)/2 cancels at low temperature
    y = math.exp(-2.0 * x)
    state = SpectralState(np.array([1.0, y]) / (1.0 + y), np.column_stack([ground, excited]))
    derivs = {}
    for name, dphi, dpar in zip(LABELS, mixing_angle_derivatives(p), (p.omega, p.coupling)):
        dx = dpar / (2.0 * p.temperature * d)
        dpg = 0.5 * _sech2(x) * dx
        ov = np.array([[0.0, -0.5 * dphi], [0.5 * dphi, 0.0]], dtype=complex)
        derivs[name] = StateDerivative(np.array([dpg, -dpg]), ov)
    return state, derivs


def density_matrix(p):
    d, x = _thermal(p)
    n = np.array([-p.coupling, 0.0, p.omega]) / d
    return 0.5 * (IDENTITY - math.tanh(x) * (n[0] * SIGMA_X + n[2] * SIGMA_Z))


def sld_pair_thermal(p):
    """Closed-form SLDs for omega and coupling and their commutator diagnostics.

    [L_omega, L_coupling] = -i commutator_coeff sy in this basis, with
    commutator_coeff = tanh(x) / (T Delta) > 0.
    """
    d, x = _thermal(p)
    t = p.temperature
    th = math.tanh(x)
    w, g = p.omega, p.coupling
    u = 1.0 / (2.0 * t * d * d)
    v = th / d ** 3
    l_w = ((g * w * u - g * w * v) * SIGMA_X - (w * w * u + g * g * v) * SIGMA_Z
           - (w * th / (2 * t * d)) * IDENTITY)
    l_g = ((g * g * u + w * w * v) * SIGMA_X + (-g * w * u + w * g * v) * SIGMA_Z
           - (g * th / (2 * t * d)) * IDENTITY)
    coeff = th / (t * d)
    state, _ = gibbs_state(p)
    weak = compatibility_trace(state, l_w, l_g)
    return SldPair(l_w, l_g, coeff, weak)


def effective_qfi(p):
    """QFI for the ratio coupling/omega: omega^4 / Delta^4."""
    if p.omega == 0:
        raise DomainError("the ratio coupling/omega is undefined at omega = 0")
    return p.omega ** 4 / _gap(p) ** 4


def ratio_jacobian(p):
    """Gradient of coupling/omega with respect to (omega, coupling)."""
    if p.omega == 0:
        raise DomainError("the ratio coupling/omega is undefined at omega = 0")
    return np.array([-p.coupling / p.omega ** 2, 1.0 / p.omega])


def effective_qfi_pseudoinverse(p, rank_tol=1e-10):
    """1 / (J I^+ J^T) for the ratio, from the singular ground-state QFIM."""
    var = effective_variance(pseudoinverse_qfim(qfim_ground(p), rank_tol), ratio_jacobian(p))
    return 1.0 / var


def effective_direction(p):
    """Non-zero eigenpair of the ground-state QFIM.

    Eigenvalue 1/Delta^2 with unit vector (coupling, -omega)/Delta, i.e. the
    direction of grad(coupling/omega).  The sign is fixed so that the
    largest-magnitude component is positive.
    """
    d = _gap(p)
    vec = np.array([p.coupling, -p.omega]) / d
    i = int(np.argmax(np.abs(vec)))
    if vec[i] < 0:
        vec = -vec
    return 1.0 / (d * d), vec


def adiabatic_time(p, gamma):
    """Ramp time (2 - sqrt2) / (2 gamma omega) to reach coupling ~ omega."""
    if not 0 < gamma < 1:
        raise DomainError("adiabaticity parameter must satisfy 0 < gamma < 1")
    if p.omega <= 0:
        raise DomainError("omega must be positive")
    return (2.0 - math.sqrt(2.0)) / (2.0 * gamma * p.omega)
