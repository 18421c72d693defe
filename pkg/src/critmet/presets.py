"""Named experiments, one per acceptance check, built on the sweep harness.

Each preset returns a list of (name, table, n_params) triples; ``n_params``
marks where parameter columns end so plots know the sweep axis.
"""
import math

import numpy as np

from . import estimation, gaussian
from . import kerr_dissipative as kerr
from . import landau_zener as lz
from .harness import ExperimentConfig, Grid, ResultTable, fit, lookup, run
from . import __version__


def _run(model, operation, workers, **bindings):
    cfg = ExperimentConfig(model, operation, bindings, workers=workers)
    table = run(cfg)
    return table, len(lookup(model, operation).params)


def tfim_closed_form(workers=1):
    t, k = _run("tfim", "qfi", workers, n_spins=[4, 10, 100, 1000, 4096])
    return [("tfim_closed_form", t, k)]


def tfim_exact(workers=1):
    t, k = _run("tfim", "exact", workers, n_spins=8, coupling=[0.5, 1.0, 1.5], omega_prime=1.05)
    return [("tfim_exact", t, k)]


def tfim_scaling(workers=1):
    t, k = _run("tfim", "snr", workers, n_spins=[32, 64, 128, 256, 512, 1024])
    fit(t, "n_spins", "collective_snr")
    fit(t, "log_n_squared", "local_snr", kind="linear")
    fit(t, "n_spins", "qfi")
    return [("tfim_scaling", t, k)]


def lz_ground(workers=1):
    t, k = _run("lz", "qfi", workers, coupling=Grid(0.0, 3.0, 301))
    return [("lz_ground", t, k)]


def lz_thermal(workers=1):
    t, k = _run("lz", "thermal", workers, omega=Grid(0.2, 2.0, 10), coupling=Grid(0.2, 2.0, 10),
                temperature=Grid(0.05, 2.0, 10, log=True))
    return [("lz_thermal", t, k)]


def ramsey(workers=1):
    lim, k1 = _run("ramsey", "limits", workers, n=Grid(2, 40, 20), t=1.0)
    tw, k2 = _run("ramsey", "twist", workers, n=100, chi=1.0, t=Grid(0.0, 0.12, 25))
    return [("ramsey_limits", lim, k1), ("ramsey_twist", tw, k2)]


def oscillator(workers=1):
    q, k1 = _run("oscillator", "qfi", workers, coupling=Grid(0.01, 0.99, 99))
    b, k2 = _run("oscillator", "budget", workers, coupling=Grid(0.5, 0.9999, 40), gamma=0.01)
    return [("oscillator_qfi", q, k1), ("oscillator_budget", b, k2)]


def kerr_steady(workers=1):
    ec = math.sqrt(2.0)
    s, k1 = _run("kerr", "steady", workers, pump=Grid(0.05 * ec, 0.99 * ec, 40))
    e_opt = kerr.optimal_pump(100, ec)
    lam = 1.0 - math.sqrt(max(e_opt ** 2 - 1.0, 0.0))
    d, k2 = _run("kerr", "dynamics", workers, pump=e_opt, damping=1.0, t=Grid(0.05, 5.0 / lam, 40, log=True))
    o, k3 = _run("kerr", "optimal", workers, n_max=Grid(1, 1000, 13, log=True))
    fit(o, "n_max", "qfi_single")
    return [("kerr_steady", s, k1), ("kerr_transient", d, k2), ("kerr_optimal", o, k3)]


def kerr_unitary(workers=1):
    t, k = _run("kerr", "dynamics", workers, pump=0.999, damping=0.0, t=Grid(5.0, 20.0, 31))
    return [("kerr_unitary", t, k)]


def lmg(workers=1):
    e, k1 = _run("lmg", "eigenstate", workers, n_spins=10, coupling=Grid(0.0, 4.0, 81), level=[0, 2, 4, 6, 8])
    o, k2 = _run("lmg", "optimum", workers, n_spins=[64, 128, 256, 512], lo=0.8, hi=1.5)
    fit(o, "n_spins", "qfi")
    q, k3 = _run("lmg", "quench", workers, coupling=[0.5, 1.0, 2.0], t=Grid(0.0, 3.0, 31))
    return [("lmg_eigenstates", e, k1), ("lmg_scaling", o, k2), ("lmg_quench", q, k3)]


def usc(workers=1):
    gc = math.sqrt(50.0)
    t, k = _run("usc", "qfi", workers, qubit_splitting=50.0, coupling=Grid(0.0, 0.99 * gc, 45))
    return [("usc", t, k)]


def mrlm(workers=1):
    t, k = _run("mrlm", "occupation", workers, dot_level=[0.0, 0.01, 0.03, 0.1, 0.3, 0.5],
                temperature=Grid(1e-6, 1e-1, 26, log=True))
    return [("mrlm_fan", t, k)]


def properties(workers=1, seed=2024, samples=200):
    """Randomised CRB ordering and physicality checks; one row per check."""
    rng = np.random.default_rng(seed)
    rows = []
    # sigma_z readout against the thermal QFI
    worst = -np.inf
    for _ in range(samples):
        w, g, temp = rng.uniform(0.05, 3, 3)
        p = lz.LzParams(w, g, temp)
        worst = max(worst, lz.snr_sigmaz_thermal(p) - lz.qfi_thermal(p).total)
    rows.append(["lz_sigmaz_crb", worst])
    # homodyne against Gaussian QFI along Kerr trajectories, and physicality
    worst_crb, worst_det = -np.inf, np.inf
    for _ in range(samples // 4):
        w, d = rng.uniform(0.2, 2, 2)
        e = rng.uniform(0, 0.98) * kerr.critical_pump(kerr.KerrParams(w, 0, d))
        p = kerr.KerrParams(w, e, d)
        t = rng.uniform(0, 10)
        st, dv = kerr.dynamics(p, t)
        worst_det = min(worst_det, float(np.linalg.det(st.covariance)))
        if t > 0:
            fi = gaussian.homodyne_fi_optimal(st, dv)[1]
            worst_crb = max(worst_crb, fi - gaussian.qfi_gaussian(st, dv))
    rows.append(["kerr_homodyne_crb", worst_crb])
    rows.append(["kerr_min_det_minus_one", worst_det - 1.0])
    # QFIM positive semidefinite for random Gibbs states
    worst_eig = np.inf
    for _ in range(samples // 4):
        w, g, temp = rng.uniform(0.05, 3, 3)
        m, _ = lz.qfim_thermal(lz.LzParams(w, g, temp))
        worst_eig = min(worst_eig, float(np.linalg.eigvalsh(m.entries)[0]))
    rows.append(["lz_qfim_min_eigenvalue", worst_eig])
    # pure-state QFI invariant under a global phase
    worst_gauge = 0.0
    for _ in range(samples // 4):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        dpsi = rng.normal(size=4) + 1j * rng.normal(size=4)
        dpsi -= 1j * np.imag(np.vdot(psi, dpsi)) * psi
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        worst_gauge = max(worst_gauge, abs(estimation.qfi_pure(psi, dpsi) - estimation.qfi_pure(phase * psi, phase * dpsi)))
    rows.append(["pure_state_gauge", worst_gauge])
    meta = {"config": {"preset": "properties", "seed": seed, "samples": samples}, "version": __version__, "fits": {}}
    return [("properties", ResultTable(["check", "value"], rows, meta), 1)]


PRESETS = {
    "tfim-closed-form": tfim_closed_form,
    "tfim-exact": tfim_exact,
    "tfim-scaling": tfim_scaling,
    "lz-ground": lz_ground,
    "lz-thermal": lz_thermal,
    "ramsey": ramsey,
    "oscillator": oscillator,
    "kerr-steady": kerr_steady,
    "kerr-unitary": kerr_unitary,
    "lmg": lmg,
    "usc": usc,
    "mrlm": mrlm,
    "properties": properties,
}
