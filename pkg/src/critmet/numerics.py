"""Shared numerical kernels.

Symmetric eigensolver, PSD pseudoinverse, complex digamma, finite
differences, fixed-step RK4 propagation and power-law fitting.  Every
function here is pure; nothing keeps module-level mutable state.
"""
import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, NumericalError, ValidationError

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class FitResult:
    """Least-squares line y = prefactor * x**exponent in log-log space."""

    exponent: float
    prefactor: float
    r_squared: float


def _check_square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def check_symmetric(a, tol=SYMMETRY_TOL):
    """Return `a` as a float array after checking it is real symmetric."""
    a = _check_square(a)
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag), initial=0.0) > tol * max(1.0, np.max(np.abs(a))):
            raise ValidationError("expected a real symmetric matrix, got complex entries")
        a = a.real
    a = np.asarray(a, dtype=float)
    scale = max(1.0, np.max(np.abs(a)))
    if np.max(np.abs(a - a.T)) > tol * scale:
        raise ValidationError("matrix is not symmetric")
    return a


def check_hermitian(a, tol=SYMMETRY_TOL):
    a = np.asarray(_check_square(a), dtype=complex)
    scale = max(1.0, np.max(np.abs(a)))
    if np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise ValidationError("matrix is not Hermitian")
    return a


def _fix_signs(vectors):
    # largest-magnitude component of every column made positive (first index wins ties)
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _householder_tridiagonal(a):
    """Reduce symmetric `a` to tridiagonal form, a = Q T Q^T."""
    n = a.shape[0]
    a = a.copy()
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        alpha = -math.copysign(norm, x[0])
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v)
    d = np.diag(a).copy()
    e = np.append(np.diag(a, 1), 0.0)
    return d, e, q


def _implicit_ql(d, e, z, max_iter=60):
    """Implicit-shift QL on a tridiagonal matrix; rotations accumulated into z."""
    n = len(d)
    d = [float(x) for x in d]
    e = [float(x) for x in e]
    eps = np.finfo(float).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise NumericalError(f"QL iteration did not converge for a {n}x{n} matrix")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(d), z


def eigh_symmetric(a, method="lapack"):
    """Full eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    a : array_like, shape (n, n)
    method : {"lapack", "ql"}
        "ql" runs the in-package Householder + implicit-shift QL solver.
        "lapack" hands the same problem to LAPACK's dsyevd, which is much
        faster for the large collective-spin Hamiltonians.

    Returns
    -------
    EigenSystem with ascending values and sign-normalised vectors.
    """
    a = check_symmetric(a)
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    if method == "lapack":
        try:
            vals, vecs = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigensolver failed for a {a.shape[0]}x{a.shape[0]} matrix") from exc
    elif method == "ql":
        d, e, q = _householder_tridiagonal(a)
        vals, vecs = _implicit_ql(d, e, q)
        order = np.argsort(vals, kind="stable")
        vals, vecs = vals[order], vecs[:, order]
    else:
        raise ValidationError(f"unknown eigensolver method {method!r}")
    return EigenSystem(np.asarray(vals, dtype=float), _fix_signs(np.asarray(vecs, dtype=float)))


def pseudoinverse_psd(a, rank_tol=1e-10):
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix.

    Eigenvalues below ``rank_tol * max_eigenvalue`` are treated as zero.
    """
    if rank_tol <= 0:
        raise ValidationError("rank_tol must be positive")
    es = eigh_symmetric(a)
    lam_max = max(abs(es.values[-1]), abs(es.values[0]))
    if lam_max == 0.0:
        return np.zeros_like(es.vectors)
    cut = rank_tol * lam_max
    if es.values[0] < -cut:
        raise DomainError(f"matrix is not PSD (eigenvalue {es.values[0]:.3e})")
    keep = es.values > cut
    v = es.vectors[:, keep]
    out = (v / es.values[keep]) @ v.T
    return 0.5 * (out + out.T)


# Bernoulli-series coefficients B_2k / (2k) for the digamma asymptotic expansion
_DIGAMMA_SERIES = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)


def digamma(z):
    """Complex digamma function psi(z).

    Upward recurrence psi(z) = psi(z + 1) - 1/z until Re z >= 8, then the
    Bernoulli asymptotic series.  Arguments with Re z < 1/2 go through the
    reflection formula first so the recurrence stays short.
    """
    z = complex(z)
    if abs(z.imag) <= 1e-14 and z.real <= 0 and abs(z.real - round(z.real)) <= 1e-14:
        raise DomainError(f"digamma has a pole at z = {z.real:g}")
    if z.real < 0.5:
        return digamma(1.0 - z) - math.pi / cmath.tan(math.pi * z)
    acc = 0j
    while z.real < 8.0:
        acc -= 1.0 / z
        z += 1.0
    w = 1.0 / (z * z)
    series = 0j
    for coeff in reversed(_DIGAMMA_SERIES):
        series = w * (coeff + series)
    return acc + cmath.log(z) - 0.5 / z - series


def digamma_difference(a, y):
    """(psi(a + iy) - psi(a - iy)) / (2iy) without cancellation at small y.

    a is real and y is real or purely imaginary (so y^2 is real), with
    a^2 + y^2 > 0 and a - |y| > 0 for imaginary y.  The value equals
    sum_k 1/((a + k)^2 + y^2) and tends to psi'(a) as y -> 0.
    """
    a = float(a)
    y = complex(y)
    y2 = (y * y).real
    if abs(y.real) > 1e-300 and abs(y.imag) > 1e-300:
        raise ValidationError("y must be real or purely imaginary")
    if a <= abs(y.imag):
        raise DomainError("a - |y| must be positive")
    total = 0.0
    b = a
    # recurrence until both arguments are far enough from the origin for the series
    while b - abs(y.imag) < 8.0:
        total += 1.0 / (b * b + y2)
        b += 1.0
    x = y / b
    if abs(x) < 1e-4:
        x2 = (x * x).real
        total += (1.0 - x2 / 3.0 + x2 * x2 / 5.0) / b
    else:
        total += (cmath.atan(x) / y).real
    uw = 1.0 / (b * b + y2)
    total += 0.5 * uw
    u = 1.0 / complex(b, 0) / (1.0 + 1j * x)
    w = 1.0 / complex(b, 0) / (1.0 - 1j * x)
    for n, coeff in enumerate(_DIGAMMA_SERIES, start=1):
        m = 2 * n
        s = sum(u ** j * w ** (m - 1 - j) for j in range(m))
        total += coeff * uw * s.real
    return total


def central_diff(f, x, h):
    """Symmetric difference quotient (f(x+h) - f(x-h)) / 2h."""
    if h <= 0:
        raise ValidationError("step h must be positive")
    hi, lo = f(x + h), f(x - h)
    if not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
        raise DomainError(f"non-finite function value near x = {x!r}")
    return (hi - lo) / (2.0 * h)


def richardson_diff(f, x, h):
    """Central difference with one Richardson step, error O(h^4)."""
    d1 = central_diff(f, x, h)
    d2 = central_diff(f, x, h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def linear_fit(xs, ys):
    """Ordinary least squares y = slope*x + intercept; returns (slope, intercept, r2)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValidationError("need at least two paired samples")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise DomainError("x values are all identical")
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    sst = np.sum((y - ym) ** 2)
    if sst == 0:
        return float(slope), float(intercept), 1.0
    ssr = np.sum((y - slope * x - intercept) ** 2)
    r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
    return float(slope), float(intercept), float(r2)


def loglog_fit(xs, ys):
    """Fit y = prefactor * x**exponent by least squares on (ln x, ln y)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3 or x.shape != y.shape:
        raise ValidationError("loglog_fit needs at least three paired samples")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("loglog_fit requires strictly positive data")
    slope, intercept, r2 = linear_fit(np.log(x), np.log(y))
    return FitResult(slope, math.exp(intercept), r2)


def operator_norm(h):
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(h), 2))


def propagate_schrodinger(h, psi0, t, dt, hnorm=None):
    """Integrate i dpsi/dt = H psi from 0 to t with fixed-step RK4.

    The last step is shortened so the final time is hit exactly.  The state
    is renormalised once at the end; the drift before that is checked.
    """
    h = np.asarray(h)
    psi = np.array(psi0, dtype=complex)
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    if t < 0:
        raise ValidationError("t must be non-negative")
    if hnorm is None:
        hnorm = operator_norm(h)
    if dt * hnorm > 0.1:
        raise ConfigurationError(
            f"step too large: dt*|H| = {dt * hnorm:.3g} > 0.1; use dt <= {0.1 / hnorm:.3g}")
    if t == 0:
        return psi
    norm0 = np.vdot(psi, psi).real
    nsteps = int(math.ceil(t / dt - 1e-12))
    step = t / nsteps
    mih = -1j * h
    for _ in range(nsteps):
        k1 = mih @ psi
        k2 = mih @ (psi + 0.5 * step * k1)
        k3 = mih @ (psi + 0.5 * step * k2)
        k4 = mih @ (psi + step * k3)
        psi = psi + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    norm = np.vdot(psi, psi).real
    if abs(norm - norm0) > 1e-8 * norm0:
        raise NumericalError(f"norm drift {abs(norm - norm0):.2e} exceeds 1e-8; reduce dt")
    return psi * math.sqrt(norm0 / norm)


def golden_section_max(f, lo, hi, tol=1e-10, max_iter=200):
    """Maximise a unimodal function on [lo, hi]; returns (x, f(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def grid_then_golden_max(f, lo, hi, grid_points=64, tol=1e-10, periodic=False):
    """Coarse scan followed by golden-section refinement around the best point.

    Ties on the grid go to the smallest abscissa.  With ``periodic`` the
    interval [lo, hi) is treated as one period.
    """
    if periodic:
        xs = lo + (hi - lo) * np.arange(grid_points) / grid_points
    else:
        xs = np.linspace(lo, hi, grid_points)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    best_x, best_f = float(xs[i]), float(vals[i])
    span = np.max(vals) - np.min(vals)
    if span <= 1e-12 * max(abs(best_f), 1e-300):
        return best_x, best_f
    step = xs[1] - xs[0]
    a, b = best_x - step, best_x + step
    if not periodic:
        a, b = max(a, lo), min(b, hi)
    x, fx = golden_section_max(f, a, b, tol=tol)
    if fx <= best_f:
        return best_x, best_f
    if periodic:
        period = hi - lo
        x = lo + (x - lo) % period
        if hi - x < tol:
            x = lo
    return float(x), float(fx)
