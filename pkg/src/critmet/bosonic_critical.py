"""Critical bosonic probes: the squeezed harmonic oscillator and the driven
dispersive quantum Rabi (ultrastrong-coupling) resonator.

Oscillator: H = omega a^dag a - (coupling/4)(a + a^dag)^2 with ground state a
squeezed vacuum of parameter xi = (1/4) ln(1 - coupling/omega) (negative for
coupling > 0).  Quadrature units follow the gaussian module, x = (a + a^dag)/sqrt2.

Rabi resonator: eliminating the qubit dispersively renormalises the cavity
frequency to omega sqrt(1 - coupling^2/g_c^2), g_c = sqrt(omega qubit_splitting).
Writing that as omega exp(-2 xi_usc) defines a positive squeezing xi_usc.  A
drive at drive_frequency with loss rate decay leaves a coherent steady state.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .estimation import snr as _snr
from .gaussian import GaussianDerivative, GaussianState


@dataclass(frozen=True)
class OscillatorParams:
    omega: float
    coupling: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValidationError("omega must be positive")


@dataclass(frozen=True)
class UscParams:
    omega: float
    qubit_splitting: float
    coupling: float
    drive: float
    decay: float
    drive_frequency: float

    def __post_init__(self):
        if self.omega <= 0 or self.qubit_splitting <= 0:
            raise ValidationError("omega and qubit_splitting must be positive")
        if self.decay <= 0:
            raise ValidationError("decay must be positive")

    @classmethod
    def at_detuning(cls, omega, qubit_splitting, coupling, drive, decay, detuning):
        """Choose the drive frequency so that the renormalised detuning is fixed."""
        r = _renorm_root(omega, qubit_splitting, coupling)
        return cls(omega, qubit_splitting, coupling, drive, decay, omega * r - detuning)


@dataclass(frozen=True)
class UscQfi:
    amplitude_part: float
    phase_part: float
    total: float
    enhancement_e4xi: float


# ---------------------------------------------------------------- oscillator

def _normal_phase(p):
    if p.coupling >= p.omega:
        raise DomainError("coupling >= omega: the quadratic model breaks down in the superradiant phase")


def xi(p):
    """(1/4) ln(1 - coupling/omega)."""
    _normal_phase(p)
    return 0.25 * math.log1p(-p.coupling / p.omega)


def dxi_domega(p):
    _normal_phase(p)
    return p.coupling / (4.0 * p.omega * (p.omega - p.coupling))


def renormalized_frequency(p):
    """omega sqrt(1 - coupling/omega) = omega exp(2 xi)."""
    _normal_phase(p)
    return p.omega * math.sqrt(1.0 - p.coupling / p.omega)


def qfi_ho(p):
    """coupling^2 / (8 omega^2 (coupling - omega)^2)."""
    _normal_phase(p)
    w, g = p.omega, p.coupling
    return g * g / (8.0 * w * w * (g - w) ** 2)


def squeezed_vacuum(p):
    """Ground state and its omega-derivative as a Gaussian manifold."""
    s, ds = xi(p), dxi_domega(p)
    cov = np.diag([math.exp(2 * s), math.exp(-2 * s)])
    dcov = np.diag([2 * ds * math.exp(2 * s), -2 * ds * math.exp(-2 * s)])
    return GaussianState(np.zeros(2), cov), GaussianDerivative(np.zeros(2), dcov)


def vacuum_excitations(p):
    """sinh^2(xi)."""
    return math.sinh(xi(p)) ** 2


def snr_number(p):
    """SNR of a photon-number readout from <n> = sinh^2 xi and Var(n) = 2 sinh^2 xi cosh^2 xi."""
    s = xi(p)
    if s == 0:
        raise DomainError("no excitations at coupling = 0: number readout is degenerate")
    sh, ch = math.sinh(s), math.cosh(s)
    dmean = 2.0 * sh * ch * dxi_domega(p)
    return _snr(dmean, 2.0 * sh * sh * ch * ch)


def snr_quadrature(p):
    """SNR of an x^2 readout; <x^2> = exp(2 xi)/2 and Var(x^2) = 2 <x^2>^2."""
    s = xi(p)
    x2 = 0.5 * math.exp(2 * s)
    return _snr(2.0 * dxi_domega(p) * x2, 2.0 * x2 * x2)


def adiabatic_budget(p, gamma):
    """Preparation time, QFI rewritten in terms of it, and the SQL crossover.

    Returns (T, 8 gamma^2 T^2 <n>^2, 1/(8 gamma^2)) with T = 8 <n> / (gamma omega).
    """
    if not 0 < gamma < 1:
        raise DomainError("adiabaticity parameter must satisfy 0 < gamma < 1")
    n = vacuum_excitations(p)
    t = 8.0 * n / (gamma * p.omega)
    return t, 8.0 * gamma ** 2 * t * t * n * n, 1.0 / (8.0 * gamma ** 2)


# ------------------------------------------------------------ Rabi resonator

def critical_coupling(omega, qubit_splitting):
    return math.sqrt(omega * qubit_splitting)


def _renorm_root(omega, qubit_splitting, coupling):
    r2 = 1.0 - coupling * coupling / (omega * qubit_splitting)
    if r2 <= 0:
        raise DomainError("coupling >= g_c: dispersive normal-phase formulas do not apply")
    return math.sqrt(r2)


def usc_renormalized_frequency(p):
    """omega sqrt(1 - coupling^2 / g_c^2)."""
    return p.omega * _renorm_root(p.omega, p.qubit_splitting, p.coupling)


def usc_squeezing(p):
    """xi_usc > 0 defined by sqrt(1 - coupling^2/g_c^2) = exp(-2 xi_usc)."""
    return -0.5 * math.log(_renorm_root(p.omega, p.qubit_splitting, p.coupling))


def usc_virtual_photons(p):
    return math.sinh(usc_squeezing(p)) ** 2


def usc_detuning(p):
    return usc_renormalized_frequency(p) - p.drive_frequency


def usc_ddetuning_domega(p):
    """Exact d(detuning)/d omega, including the omega dependence of g_c."""
    r = _renorm_root(p.omega, p.qubit_splitting, p.coupling)
    return (2.0 * p.omega - p.coupling ** 2 / p.qubit_splitting) / (2.0 * p.omega * r)


def usc_steady_alpha(p):
    """Coherent amplitude 2 sqrt(decay drive^2/(decay^2 + 4 d^2)) exp(-i atan(decay / 2d))."""
    d = usc_detuning(p)
    k = p.decay
    amp = 2.0 * math.sqrt(k * p.drive ** 2 / (k * k + 4 * d * d))
    return amp * cmath.exp(-1j * math.atan2(k, 2 * d))


def usc_mean_field_residual(p, alpha=None):
    """|d alpha/dt| of  d alpha/dt = (i d - decay/2) alpha - i sqrt(decay) drive."""
    if alpha is None:
        alpha = usc_steady_alpha(p)
    d = usc_detuning(p)
    return abs((1j * d - 0.5 * p.decay) * alpha - 1j * math.sqrt(p.decay) * p.drive)


def usc_photon_number(p):
    """|alpha|^2 = 4 decay drive^2 / (decay^2 + 4 d^2)."""
    d = usc_detuning(p)
    return 4.0 * p.decay * p.drive ** 2 / (p.decay ** 2 + 4 * d * d)


def usc_qfi_omega(p):
    """Exact QFI of the coherent steady state for omega, split as 4 (dA)^2 + 4 A^2 (dphi)^2."""
    d = usc_detuning(p)
    k = p.decay
    dd = usc_ddetuning_domega(p)
    a2 = usc_photon_number(p)
    den = k * k + 4 * d * d
    amp = 4.0 * a2 * 16.0 * d * d * dd * dd / den ** 2
    phase = 4.0 * a2 * 4.0 * k * k * dd * dd / den ** 2
    e4 = 1.0 / _renorm_root(p.omega, p.qubit_splitting, p.coupling) ** 2
    return UscQfi(amp, phase, amp + phase, e4)


def usc_qfi_near_critical(p):
    """Printed near-critical approximation, kept for comparison with the exact result.

    Returns (amplitude_part, phase_part, total).
    """
    d = usc_detuning(p)
    k, w, om, g = p.decay, p.omega, p.qubit_splitting, p.coupling
    a2 = usc_photon_number(p)
    e4 = 1.0 / _renorm_root(w, om, g) ** 2
    base = om * (4 * d * d + k * k) - 4 * g * g * w
    amp = 4 * a2 * 4 * d * d * om * (4 * d * d + k * k) / (w * w * base ** 3) * e4
    phase = 4 * a2 * 4 * k * k / (w * w * base ** 2) * e4
    return amp, phase, amp + phase


def usc_output_manifold(p):
    """Coherent output as a Gaussian state with its omega-derivative."""
    alpha = usc_steady_alpha(p)
    d = usc_detuning(p)
    k = p.decay
    # d alpha / d d  = -2 alpha / (2d + i k) since alpha is proportional to 1/(2d + i k)
    dalpha = -2.0 * alpha / (2 * d + 1j * k) * usc_ddetuning_domega(p)
    mean = math.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    dmean = math.sqrt(2.0) * np.array([dalpha.real, dalpha.imag])
    return GaussianState(mean, np.eye(2)), GaussianDerivative(dmean, np.zeros((2, 2)))
