"""Majorana resonant-level model: dot occupation and QFI for the dot level.

The occupation of the effective resonant level at temperature T is

    <n_d> = 1/2 - Im{ (e/(pi D)) [psi(1/2 + (G + iD)/(4 pi T)) - psi(1/2 + (G - iD)/(4 pi T))] }

with e = dot_level, G = hybridization and D = sqrt(4 e^2 - G^2), taken as a
complex root (purely imaginary when 2|e| < G) in both the prefactor and the
digamma arguments.  The digamma difference divided by D is evaluated as one
cancellation-free sum, which stays smooth through D = 0.  Units are set by
the hybridization width.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, ValidationError
from .numerics import digamma, digamma_difference, richardson_diff

RESIDUE_TOL = 1e-10
CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class MrlmParams:
    dot_level: float
    hybridization: float
    temperature: float

    def __post_init__(self):
        if self.hybridization <= 0:
            raise ValidationError("hybridization must be positive")
        if self.temperature <= 0:
            raise ValidationError("temperature must be positive")


@dataclass(frozen=True)
class MrlmQfi:
    qfi: float
    occupation: float
    slope: float
    consistency: float


@dataclass(frozen=True)
class FanScan:
    rows: np.ndarray
    best_temperature: np.ndarray
    best_qfi: np.ndarray


def _half_width(p):
    """(D / (4 pi T)) as a real or purely imaginary number."""
    d2 = 4 * p.dot_level ** 2 - p.hybridization ** 2
    root = math.sqrt(d2) if d2 >= 0 else 1j * math.sqrt(-d2)
    return root / (4 * math.pi * p.temperature)


def dot_occupation(p):
    """Occupation from the cancellation-free digamma difference.

    With y = D / (4 pi T) and a = 1/2 + G / (4 pi T) the bracket equals
    2i e F(a, y) / (4 pi^2 T), F = (psi(a + iy) - psi(a - iy)) / (2iy),
    so the result is real by construction and continuous through D = 0.
    """
    if p.dot_level == 0:
        return 0.5
    a = 0.5 + p.hybridization / (4 * math.pi * p.temperature)
    f = digamma_difference(a, _half_width(p))
    return 0.5 - p.dot_level * f / (2 * math.pi ** 2 * p.temperature)


def occupation_terms(p):
    """The complex bracket v of the direct formula, <n_d> = 1/2 - Im v."""
    e, gam, t = p.dot_level, p.hybridization, p.temperature
    if e == 0:
        return 0j
    root = complex(4 * e * e - gam * gam) ** 0.5
    if root == 0:
        raise DomainError("direct formula is 0/0 at 2|dot_level| = hybridization")
    scale = 4 * math.pi * t
    plus = digamma(0.5 + (gam + 1j * root) / scale)
    minus = digamma(0.5 + (gam - 1j * root) / scale)
    return (e / (math.pi * root)) * (plus - minus)


def dot_occupation_direct(p):
    """Occupation straight from the digamma pair; loses digits near 2|dot_level| = hybridization."""
    v = occupation_terms(p)
    if abs(v.real) > RESIDUE_TOL * max(1.0, abs(v)):
        raise NumericalError(f"occupation bracket has a real residue {v.real:.3g}")
    return 0.5 - v.imag


def _occupation_at(p, e):
    return dot_occupation(MrlmParams(e, p.hybridization, p.temperature))


def qfi_detail(p):
    """QFI (dn/de)^2 / (n (1 - n)) with a Richardson derivative and a dual-step check."""
    n = dot_occupation(p)
    if min(n, 1.0 - n) <= 1e-14:
        raise DomainError("occupation pinned to 0 or 1: the probe is insensitive")
    # the occupation is analytic in dot_level^2; it varies on the scale G + 4 pi T,
    # or on max(|e|, sqrt(4 pi T G)) once the temperature is small
    gam, t4 = p.hybridization, 4 * math.pi * p.temperature
    h = 1e-3 * min(gam + t4, max(abs(p.dot_level), math.sqrt(t4 * gam)))
    f = lambda e: _occupation_at(p, e)
    slope = richardson_diff(f, p.dot_level, h)
    check = richardson_diff(f, p.dot_level, 2 * h)
    consistency = abs(slope - check) / max(abs(slope), 1e-300)
    if consistency > CONSISTENCY_TOL and abs(slope - check) > 1e-12:
        raise NumericalError(f"derivative step sizes disagree (relative {consistency:.2g})")
    return MrlmQfi(slope * slope / (n * (1.0 - n)), n, slope, consistency)


def qfi_epsd(p):
    return qfi_detail(p).qfi


def crossover_scale(p):
    """T* = dot_level^2 / hybridization."""
    return p.dot_level ** 2 / p.hybridization


def critical_fan_scan(hybridization, eps_grid, temp_grid):
    """Occupation and QFI on a (dot level, temperature) grid.

    Rows are (dot_level, temperature, occupation, qfi) with the temperature
    varying fastest; also returns the best temperature and QFI per level.
    """
    eps = np.asarray(eps_grid, dtype=float)
    temps = np.asarray(temp_grid, dtype=float)
    if eps.size == 0 or temps.size == 0:
        raise ValidationError("grids must be non-empty")
    if np.any(temps <= 0):
        raise ValidationError("temperatures must be positive")
    rows = []
    best_t, best_q = [], []
    for e in eps:
        qs = []
        for t in temps:
            r = qfi_detail(MrlmParams(float(e), hybridization, float(t)))
            rows.append((e, t, r.occupation, r.qfi))
            qs.append(r.qfi)
        i = int(np.argmax(qs))
        best_t.append(temps[i])
        best_q.append(qs[i])
    return FanScan(np.array(rows), np.array(best_t), np.array(best_q))
