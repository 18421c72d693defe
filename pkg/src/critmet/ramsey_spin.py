"""Collective-spin Ramsey interferometry in the symmetric Dicke subspace.

Basis vectors are |S=n/2, m>, m = -S..S, stored at index k = m + S (k is
the number of excited spins).  Coherent spin states (CSS) are labelled by
a polar angle measured from the all-down state and an azimuth, so
css(pi/2, 0) points along +x and css(pi/2, pi/2) along +y.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ValidationError
from .estimation import snr as _snr
from .numerics import propagate_schrodinger

TWIST_GUARD = 50.0
DEFAULT_STEP = 0.05


@dataclass(frozen=True)
class CollectiveOps:
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray

    @property
    def spin(self):
        return (self.sz.shape[0] - 1) / 2.0


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValidationError(f"particle number must be a positive integer, got {n!r}")
    return int(n)


def collective_ops(n):
    """Sx, Sy, Sz for n spin-1/2 particles in the Dicke basis."""
    n = _check_n(n)
    s = n / 2.0
    m = np.arange(n + 1) - s
    # S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>
    sp = np.diag(np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1)), -1)
    sx = 0.5 * (sp + sp.T)
    sy = -0.5j * (sp - sp.T)
    return CollectiveOps(sx.astype(complex), sy, np.diag(m).astype(complex))


def _log_binom(n):
    k = np.arange(n + 1)
    return np.array([math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1) for j in k])


def _css_magnitudes(n, theta):
    """sqrt(C(n,k)) cos(theta/2)^(n-k) sin(theta/2)^k for an array of angles."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.arange(n + 1)
    c = np.cos(theta / 2.0)[:, None]
    s = np.sin(theta / 2.0)[:, None]
    half_binom = np.exp(0.5 * _log_binom(n))[None, :]
    return half_binom * c ** (n - k) * s ** k


def css(n, theta, phi):
    """Coherent spin state; <S> = (n/2)(sin t cos p, sin t sin p, -cos t)."""
    n = _check_n(n)
    k = np.arange(n + 1)
    amp = _css_magnitudes(n, theta)[0] * np.exp(-1j * k * phi)
    return amp / np.linalg.norm(amp)


def ghz(n, axis="y"):
    """Equal superposition of the two extremal eigenstates of S_axis."""
    n = _check_n(n)
    angles = {"x": ((np.pi / 2, 0.0), (np.pi / 2, np.pi)),
              "y": ((np.pi / 2, np.pi / 2), (np.pi / 2, -np.pi / 2)),
              "z": ((np.pi, 0.0), (0.0, 0.0))}
    if axis not in angles:
        raise ValidationError("axis must be one of x, y, z")
    (t1, p1), (t2, p2) = angles[axis]
    psi = css(n, t1, p1) + css(n, t2, p2)
    return psi / np.linalg.norm(psi)


def expectation(op, psi):
    return complex(np.vdot(psi, op @ psi))


def variance(op, psi):
    mean = expectation(op, psi).real
    return float(np.vdot(psi, op @ (op @ psi)).real - mean * mean)


def spin_vector(psi):
    ops = collective_ops(len(psi) - 1)
    return np.array([expectation(o, psi).real for o in (ops.sx, ops.sy, ops.sz)])


def css_signal(n, omega, t):
    """Ramsey signal <S_x>(t) = (n/2) sin(omega t) of an x-polarised CSS."""
    return 0.5 * n * math.sin(omega * t)


def css_snr(n, omega, t):
    """SNR of a CSS Ramsey readout: n t^2 cos^2(omega t)."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    dsignal = 0.5 * n * t * math.cos(omega * t)
    return _snr(dsignal, n / 4.0)


def ghz_signal_noise(n, omega, t):
    """Parity signal cos(n omega t), its variance sin^2, and d signal / d omega."""
    phase = n * omega * t
    return math.cos(phase), math.sin(phase) ** 2, -n * t * math.sin(phase)


def ghz_snr(n, omega, t):
    """GHZ parity-readout SNR n^2 t^2 (sin^2 cancels between slope and noise)."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    return float(n * n * t * t)


def qfi_rotation(psi, t):
    """QFI of exp(-i omega t S_y) applied to psi: 4 t^2 Var(S_y)."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    ops = collective_ops(len(psi) - 1)
    return 4.0 * t * t * variance(ops.sy, psi)


def twist_hamiltonian(n, kind="two_axis", chi=1.0):
    """chi S_z^2 (one-axis) or chi (S_z^2 - S_y^2) (two-axis), real symmetric."""
    ops = collective_ops(n)
    sz2 = (ops.sz @ ops.sz).real
    if kind == "one_axis":
        return chi * sz2
    if kind == "two_axis":
        return chi * (sz2 - (ops.sy @ ops.sy).real)
    raise ValidationError("kind must be 'one_axis' or 'two_axis'")


def _twist_bound(n, chi):
    s = n / 2.0
    return abs(chi) * s * (s + 1)


def twist_evolve(kind, chi, t, psi0, dt=None):
    """Propagate psi0 under a twisting Hamiltonian for time t."""
    psi0 = np.asarray(psi0, dtype=complex)
    n = len(psi0) - 1
    if abs(chi) * t * n > TWIST_GUARD:
        raise ConfigurationError(f"chi*t*n = {abs(chi) * t * n:.3g} exceeds {TWIST_GUARD}")
    if t == 0 or chi == 0:
        return psi0.copy()
    if dt is None:
        dt = DEFAULT_STEP / (abs(chi) * n * n)
    h = twist_hamiltonian(n, kind, chi)
    return propagate_schrodinger(h, psi0, t, dt, hnorm=_twist_bound(n, chi))


def transverse_noise(psi):
    """Smallest variance among quadratures in the y-z plane."""
    ops = collective_ops(len(psi) - 1)
    my = expectation(ops.sy, psi).real
    mz = expectation(ops.sz, psi).real
    vyy = variance(ops.sy, psi)
    vzz = variance(ops.sz, psi)
    vyz = 0.5 * expectation(ops.sy @ ops.sz + ops.sz @ ops.sy, psi).real - my * mz
    return float(np.linalg.eigvalsh(np.array([[vyy, vyz], [vyz, vzz]]))[0])


def snr_tradeoff_curve(n, chi, t_grid, kind="two_axis", dt=None):
    """Signal, noise and SNR of a twisted probe as a function of twisting time.

    Each row is (t, signal^2, noise, snr) with signal^2 = <S_x>^2 (the Ramsey
    slope per unit interrogation time, squared), noise the minimum transverse
    variance and snr = signal^2 / noise.  The Heisenberg ceiling is n^2.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.size == 0 or np.any(np.diff(ts) < 0) or ts[0] < 0:
        raise ValidationError("t_grid must be non-empty, non-negative and non-decreasing")
    n = _check_n(n)
    ops = collective_ops(n)
    psi = css(n, np.pi / 2, 0.0)
    t_prev = 0.0
    rows = []
    if dt is None:
        dt = DEFAULT_STEP / (abs(chi) * n * n)
    h = twist_hamiltonian(n, kind, chi)
    if abs(chi) * ts[-1] * n > TWIST_GUARD:
        raise ConfigurationError(f"chi*t*n = {abs(chi) * ts[-1] * n:.3g} exceeds {TWIST_GUARD}")
    for t in ts:
        if t > t_prev:
            psi = propagate_schrodinger(h, psi, t - t_prev, dt, hnorm=_twist_bound(n, chi))
            t_prev = t
        sig2 = expectation(ops.sx, psi).real ** 2
        noise = transverse_noise(psi)
        rows.append((float(t), sig2, noise, sig2 / noise))
    return np.array(rows)


def first_local_minimum(values):
    """Index of the first interior local minimum, or of the global minimum if none."""
    v = np.asarray(values, dtype=float)
    for i in range(1, v.size - 1):
        if v[i] <= v[i - 1] and v[i] < v[i + 1]:
            return i
    return int(np.argmin(v))


def husimi_q(psi, theta_grid, phi_grid):
    """Q(theta, phi) = |<css(theta, phi)|psi>|^2 on a tensor grid."""
    psi = np.asarray(psi, dtype=complex)
    theta = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    phi = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if theta.size == 0 or phi.size == 0:
        raise ValidationError("grids must be non-empty")
    n = len(psi) - 1
    mags = _css_magnitudes(n, theta)
    phases = np.exp(1j * np.outer(np.arange(n + 1), phi))
    overlap = mags @ (psi[:, None] * phases)
    return np.clip(np.abs(overlap) ** 2, 0.0, 1.0)
