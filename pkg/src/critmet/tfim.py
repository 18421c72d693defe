"""Transverse-field Ising ring solved in momentum space.

H = omega sum s^z_i - coupling sum s^x_i s^x_{i+1} (Pauli matrices) on an even ring of
n_spins sites, ground state in the even-fermion-parity sector with the
antiperiodic momenta k = pi (2j + 1) / N, j = 0..N/2 - 1.  Every (k, -k)
pair is an independent two-level problem whose Bloch angle theta_k obeys

    tan(theta_k) = coupling sin k / (coupling cos k - omega),  theta_k in (0, pi)

for coupling > 0.  The block ground state rotates by theta_k / 2, so the
fidelity is prod cos((theta_k - theta'_k)/2) and the QFI for omega is
4 sum (d theta_k/2 / d omega)^2.

Signed magnetisation <s^z> is negative with the convention above; the
public `magnetization_z` returns its magnitude.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .numerics import loglog_fit


@dataclass(frozen=True)
class TfimParams:
    n_spins: int
    omega: float
    coupling: float

    def __post_init__(self):
        n = self.n_spins
        if int(n) != n or n < 4 or n % 2:
            raise ValidationError(f"n_spins must be an even integer >= 4, got {n!r}")
        object.__setattr__(self, "n_spins", int(n))


@dataclass(frozen=True)
class MomentumBlock:
    k: float
    theta: float
    dhalf_angle_domega: float


def momenta(n):
    return np.pi * (2 * np.arange(n // 2) + 1) / n


def _denominator(p, k):
    return p.coupling ** 2 + p.omega ** 2 - 2 * p.coupling * p.omega * np.cos(k)


def block_angles(p):
    """Momenta, Bloch angles and d(theta/2)/d omega as arrays."""
    k = momenta(p.n_spins)
    theta = np.arctan2(p.coupling * np.sin(k), p.coupling * np.cos(k) - p.omega)
    dhalf = p.coupling * np.sin(k) / (2.0 * _denominator(p, k))
    return k, theta, dhalf


def blocks(p):
    return [MomentumBlock(float(a), float(b), float(c)) for a, b, c in zip(*block_angles(p))]


def dispersion(p, k):
    """Quasiparticle branch -2 sqrt(coupling^2 + omega^2 - 2 coupling omega cos k)."""
    return -2.0 * np.sqrt(_denominator(p, k))


def fidelity(p, omega_prime):
    """Ground-state overlap |<GS(omega)|GS(omega')>| as a product over blocks."""
    other = TfimParams(p.n_spins, omega_prime, p.coupling)
    _, th1, _ = block_angles(p)
    _, th2, _ = block_angles(other)
    return float(np.prod(np.cos(0.5 * (th1 - th2))))


def fidelity_susceptibility(p):
    _, _, dhalf = block_angles(p)
    return float(np.sum(dhalf ** 2))


def qfi(p):
    """sum_k coupling^2 sin^2 k / (coupling^2 + omega^2 - 2 coupling omega cos k)^2."""
    k = momenta(p.n_spins)
    return float(np.sum(p.coupling ** 2 * np.sin(k) ** 2 / _denominator(p, k) ** 2))


def qfi_critical_closed_form(n, omega):
    """Exact value of the momentum sum at coupling = omega: (N^2 - N) / (8 omega^2)."""
    return (n * n - n) / (8.0 * omega * omega)


def gap(p):
    """2 sqrt(omega^2 + coupling^2 - 2 omega coupling cos(2 pi / N))."""
    return float(2.0 * math.sqrt(_denominator(p, 2 * math.pi / p.n_spins)))


def gap_approx(p):
    return 4.0 * math.pi * p.omega / p.n_spins


def adiabatic_time(p, gamma):
    """Ramp time from coupling = 0 to the working point at adiabaticity gamma."""
    if not 0 < gamma < 1:
        raise DomainError("adiabaticity parameter must satisfy 0 < gamma < 1")
    k = 2 * math.pi / p.n_spins
    w, g = p.omega, p.coupling
    bracket = 1.0 / math.tan(k) - (g - w * math.cos(k)) / (math.sin(k) * math.sqrt(_denominator(p, k)))
    return bracket / (4.0 * gamma * w)


def adiabatic_qfi(p, gamma):
    """QFI rewritten in terms of the ramp time: 8 pi^2 gamma^2 T^2 + pi gamma T / omega."""
    t = adiabatic_time(p, gamma)
    return 8 * math.pi ** 2 * gamma ** 2 * t * t + math.pi * gamma * t / p.omega


def magnetization_z_signed(p):
    k = momenta(p.n_spins)
    return float(-2.0 / p.n_spins * np.sum((p.omega - p.coupling * np.cos(k)) / np.sqrt(_denominator(p, k))))


def magnetization_z(p):
    """|<s^z>| per site."""
    return abs(magnetization_z_signed(p))


def susceptibility_z(p):
    """d<s^z>/d omega of the signed magnetisation."""
    k = momenta(p.n_spins)
    g = p.coupling
    return float(-2.0 / p.n_spins * np.sum(g * g * np.sin(k) ** 2 / _denominator(p, k) ** 1.5))


def local_snr(p):
    """Single-site readout: chi_z^2 / (1 - <s^z>^2)."""
    m = magnetization_z_signed(p)
    var = 1.0 - m * m
    if var <= 1e-14:
        raise DomainError("single-site variance vanishes (fully polarised chain)")
    return susceptibility_z(p) ** 2 / var


def _g_function(p, r):
    """G_r for an array of separations r (may be negative)."""
    k = momenta(p.n_spins)
    r = np.atleast_1d(np.asarray(r))
    eps = -2.0 * np.sqrt(_denominator(p, k))
    rk = np.outer(r, k)
    terms = (np.cos(rk) * (p.coupling * np.cos(k) - p.omega) - p.coupling * np.sin(rk) * np.sin(k)) / eps
    return -4.0 / p.n_spins * terms.sum(axis=1)


def _correlations(p, r):
    g0 = magnetization_z_signed(p)
    r = np.atleast_1d(np.asarray(r))
    return g0 * g0 - _g_function(p, r) * _g_function(p, -r)


def two_point_zz(p, r):
    """<s^z_0 s^z_r> from the Wick contraction of the free-fermion Green's function."""
    if int(r) != r or not 1 <= r <= p.n_spins - 1:
        raise ValidationError(f"separation must be an integer in [1, N-1], got {r!r}")
    return float(_correlations(p, [int(r)])[0])


def collective_variance(p):
    """Var(S_z) with S_z = (1/2) sum s^z_i, from the two-point functions."""
    n = p.n_spins
    m = magnetization_z_signed(p)
    conn = _correlations(p, np.arange(1, n)) - m * m
    return 0.25 * n * ((1.0 - m * m) + np.sum(conn))


def collective_snr(p):
    """(d<S_z>/d omega)^2 / Var(S_z) for the collective magnetisation."""
    var = collective_variance(p)
    if var <= 1e-14:
        raise DomainError("collective variance vanishes (fully polarised chain)")
    dsz = 0.5 * p.n_spins * susceptibility_z(p)
    return dsz * dsz / var


def critical_scaling(sizes, quantity, omega=1.0):
    """Evaluate a per-size quantity at coupling = omega and fit a power law."""
    sizes = [int(n) for n in sizes]
    vals = [quantity(TfimParams(n, omega, omega)) for n in sizes]
    return sizes, vals, loglog_fit(sizes, vals)


ED_MAX_SPINS = 12


@dataclass(frozen=True)
class ExactObservables:
    qfi: float
    magnetization_z: float
    correlations: np.ndarray
    fidelity: float


def dense_hamiltonian(p):
    """Full 2^N Hamiltonian of the ring in the computational basis."""
    n = p.n_spins
    if n > ED_MAX_SPINS:
        raise ValidationError(f"dense diagonalisation is limited to {ED_MAX_SPINS} spins")
    states = np.arange(2 ** n)
    bits = (states[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    # s^z = +1 for bit 0, -1 for bit 1
    diag = p.omega * np.sum(1 - 2 * bits, axis=1).astype(float)
    h = np.diag(diag)
    for i in range(n):
        j = (i + 1) % n
        flipped = states ^ (1 << (n - 1 - i)) ^ (1 << (n - 1 - j))
        h[flipped, states] -= p.coupling
    return h


def exact_observables(p, omega_prime=None):
    """Ground-state QFI, <s^z>, <s^z_0 s^z_r> and fidelity by brute force.

    The QFI uses the perturbation sum over all excited states with the
    generator sum_i s^z_i; this is an independent check of the momentum route.
    """
    n = p.n_spins
    h = dense_hamiltonian(p)
    energies, vectors = np.linalg.eigh(h)
    psi = vectors[:, 0]
    states = np.arange(2 ** n)
    spins = 1 - 2 * ((states[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1)
    total_z = spins.sum(axis=1).astype(float)
    elems = vectors.T @ (total_z * psi)
    gaps = energies - energies[0]
    mask = gaps > 1e-10 * np.max(np.abs(energies))
    qfi_val = 4.0 * float(np.sum(elems[mask] ** 2 / gaps[mask] ** 2))
    prob = psi * psi
    mag = float(prob @ spins[:, 0])
    corr = np.array([prob @ (spins[:, 0] * spins[:, r]) for r in range(1, n)])
    fid = float("nan")
    if omega_prime is not None:
        other = np.linalg.eigh(dense_hamiltonian(TfimParams(n, omega_prime, p.coupling)))[1][:, 0]
        fid = float(abs(other @ psi))
    return ExactObservables(qfi_val, mag, corr, fid)
