"""Isotropic Lipkin-Meshkov-Glick model H = omega S_z - (coupling/N) S_x^2.

Finite-N spectra come from exact diagonalisation in the Dicke basis, split
into the two parity sectors (-1)^(S_z + N/2) which H never mixes.  The
thermodynamic-limit results (squeezed Fock states, sudden quenches) are
closed forms of the equivalent quadratic oscillator
omega a^dag a - (coupling/4)(a + a^dag)^2.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import EigenSystem, eigh_symmetric, grid_then_golden_max
from .ramsey_spin import collective_ops


@dataclass(frozen=True)
class LmgParams:
    n_spins: int
    omega: float
    coupling: float

    def __post_init__(self):
        n = self.n_spins
        if int(n) != n or n < 2:
            raise ValidationError(f"n_spins must be an integer >= 2, got {n!r}")
        object.__setattr__(self, "n_spins", int(n))


@dataclass(frozen=True)
class EigenstateResponse:
    """Linear response of one eigenstate to a change of omega."""

    qfi: float
    dsz: float
    sz_variance: float
    excluded_pairs: int

    @property
    def snr(self):
        if self.sz_variance <= 1e-14:
            raise DomainError("S_z variance vanishes for this eigenstate")
        return self.dsz ** 2 / self.sz_variance


def hamiltonian(p):
    ops = collective_ops(p.n_spins)
    sz = ops.sz.real
    sx = ops.sx.real
    return p.omega * sz - (p.coupling / p.n_spins) * (sx @ sx)


def parity(n):
    """Diagonal of the parity operator (-1)^(S_z + N/2) in the Dicke basis."""
    return np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)


def eigensystem(p, method="lapack"):
    """Full spectrum assembled from the two parity blocks."""
    h = hamiltonian(p)
    n = p.n_spins
    dim = n + 1
    vals, vecs = [], []
    for start in (0, 1):
        idx = np.arange(start, dim, 2)
        es = eigh_symmetric(h[np.ix_(idx, idx)], method=method)
        full = np.zeros((dim, idx.size))
        full[idx, :] = es.vectors
        vals.append(es.values)
        vecs.append(full)
    vals = np.concatenate(vals)
    vecs = np.concatenate(vecs, axis=1)
    order = np.argsort(vals, kind="stable")
    return EigenSystem(vals[order], vecs[:, order])


def eigenstate_response(p, level, es=None):
    """QFI, d<S_z>/d omega and Var(S_z) of one eigenstate via perturbation sums."""
    n = p.n_spins
    if int(level) != level or not 0 <= level <= n:
        raise ValidationError(f"level must be an integer in [0, {n}], got {level!r}")
    if es is None:
        es = eigensystem(p)
    m = np.arange(n + 1) - n / 2.0
    vec = es.vectors[:, level]
    # S_z is diagonal, so <k|S_z|level> = sum_m v_k(m) m v_level(m)
    elems = es.vectors.T @ (m * vec)
    gaps = es.values - es.values[level]
    scale = max(np.max(np.abs(es.values)), 1e-300)
    mask = np.abs(gaps) > 1e-10 * scale
    mask[level] = False
    excluded = int(np.count_nonzero(~mask)) - 1
    qfi = 4.0 * float(np.sum(elems[mask] ** 2 / gaps[mask] ** 2))
    dsz = 2.0 * float(np.sum(elems[mask] ** 2 / (-gaps[mask])))
    var = float(np.dot(vec * vec, m * m) - np.dot(vec * vec, m) ** 2)
    return EigenstateResponse(qfi, dsz, var, excluded)


def qfi_eigenstate(p, level=0):
    return eigenstate_response(p, level).qfi


def snr_sz_eigenstate(p, level=0):
    return eigenstate_response(p, level).snr


def optimal_coupling(n_spins, omega, level=0, quantity="qfi", bounds=(0.0, 4.0), grid_points=81):
    """Coupling that maximises the QFI (or S_z SNR) of a given eigenstate.

    Returns (coupling, value).
    """
    def f(g):
        r = eigenstate_response(LmgParams(n_spins, omega, g), level)
        return r.qfi if quantity == "qfi" else (r.snr if r.sz_variance > 1e-14 else 0.0)
    lo, hi = bounds[0] * omega, bounds[1] * omega
    return grid_then_golden_max(f, lo, hi, grid_points=grid_points, tol=1e-7 * omega)


def squeezing_parameter(omega, coupling):
    """xi = (1/4) log(omega / (omega - coupling)) of the thermodynamic-limit ground state."""
    if not 0 <= coupling < omega:
        raise DomainError("thermodynamic-limit formula needs 0 <= coupling < omega")
    return 0.25 * math.log(omega / (omega - coupling))


def squeezed_fock_qfi(n_level, omega, coupling):
    """2 (n^2 + n + 1) (d xi / d omega)^2 for the n-th squeezed Fock state."""
    if int(n_level) != n_level or n_level < 0:
        raise ValidationError("n_level must be a non-negative integer")
    squeezing_parameter(omega, coupling)
    dxi = 0.25 * (1.0 / omega - 1.0 / (omega - coupling))
    return 2.0 * (n_level * n_level + n_level + 1) * dxi * dxi


def _sin_minus_arg_over_cube(y):
    """(sin y - y) / y^3, with a Taylor series near 0."""
    if abs(y) < 1e-2:
        y2 = y * y
        return -1.0 / 6 + y2 / 120 - y2 * y2 / 5040 + y2 ** 3 / 362880
    return (math.sin(y) - y) / y ** 3


def quench_detuning(omega, coupling):
    """delta = 4 (1 - coupling / omega)."""
    return 4.0 * (1.0 - coupling / omega)


def quench_qfi(omega, coupling, t, critical_window=1e-8):
    """QFI after a sudden quench from coupling 0 (thermodynamic limit).

    Oscillating form below the critical coupling, omega^4 t^6 / 18 at it,
    and the hyperbolic form above it.
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    delta = quench_detuning(omega, coupling)
    if abs(delta) <= critical_window:
        return omega ** 4 * t ** 6 / 18.0
    if delta > 0:
        y = math.sqrt(delta) * omega * t
        # (sin y - y)/(sqrt(delta) delta) = (omega t)^3 (sin y - y)/y^3
        amp = (omega * t) ** 3 * _sin_minus_arg_over_cube(y)
        return 2.0 / omega ** 2 * amp * amp
    ad = abs(delta)
    return 2.0 * coupling ** 3 / omega ** 5 * math.sinh(math.sqrt(ad) * omega * t) ** 2 / ad ** 3


def _sinc2(u):
    """sin^2(sqrt u) / u, continued to u < 0 as sinh^2(sqrt(-u)) / (-u)."""
    if abs(u) < 1e-6:
        return 1.0 - u / 3.0 + 2.0 * u * u / 45.0
    if u > 0:
        r = math.sqrt(u)
        return math.sin(r) ** 2 / u
    r = math.sqrt(-u)
    return math.sinh(r) ** 2 / (-u)


def quench_photons(omega, coupling, t):
    """Excitations created by the quench: (coupling t / 2)^2 sin^2(nu t) / (nu t)^2.

    nu^2 = omega (omega - coupling); at coupling = 2 omega this is sinh^2(omega t).
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    nu2 = omega * (omega - coupling)
    return (0.5 * coupling * t) ** 2 * _sinc2(nu2 * t * t)


def thermodynamic_qfi_scalings(n_spins, omega, gamma):
    """Asymptotic static, adiabatic and optimal-excited-state QFIs.

    The adiabatic ramp time is taken as T = N^(1/3) / (gamma omega), which
    makes gamma^2 N^(2/3) T^2 coincide with the static N^(4/3) / omega^2.
    """
    if n_spins < 2:
        raise ValidationError("n_spins must be >= 2")
    if not 0 < gamma < 1:
        raise DomainError("adiabaticity parameter must satisfy 0 < gamma < 1")
    n = float(n_spins)
    t_ramp = n ** (1 / 3) / (gamma * omega)
    static = n ** (4 / 3) / omega ** 2
    adiabatic = gamma ** 2 * n ** (2 / 3) * t_ramp ** 2
    excited = gamma ** 2 * n ** (4 / 3) * t_ramp ** 2 / 6.0
    return static, adiabatic, excited
