"""Experiment runner: parameter sweeps over model operations, fits and emission.

An operation maps keyword parameters to one output row (a tuple matching its
column names).  A sweep evaluates the operation on the Cartesian product of
the bound values, in lexicographic grid order, optionally across worker
processes.  Domain errors become an ``error`` column unless strict mode is on.
"""
import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import bosonic_critical as osc
from . import kerr_dissipative as kerr
from . import landau_zener as lz
from . import lmg
from . import mrlm
from . import ramsey_spin as ramsey
from . import tfim
from .errors import CritmetError, ValidationError
from .numerics import linear_fit, loglog_fit

INTEGER_PARAMS = {"n", "n_spins", "level", "n_level"}


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.points < 1:
            raise ValidationError("grid needs at least one point")
        if self.log and (self.lo <= 0 or self.hi <= 0):
            raise ValidationError("log-scale grids must be strictly positive")

    def values(self):
        if self.points == 1:
            return np.array([self.lo])
        if self.log:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)

    def spec(self):
        return f"{self.lo!r}:{self.hi!r}:{self.points}" + (":log" if self.log else "")


def parse_grid(text):
    """'min:max:points[:log|lin]' -> Grid."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValidationError(f"grid spec must be min:max:points[:log], got {text!r}")
    scale = parts[3] if len(parts) == 4 else "lin"
    if scale not in ("lin", "log"):
        raise ValidationError(f"grid scale must be lin or log, got {scale!r}")
    try:
        lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"bad grid spec {text!r}: {exc}") from None
    return Grid(lo, hi, pts, scale == "log")


@dataclass(frozen=True)
class Operation:
    func: object
    params: tuple
    columns: tuple
    defaults: dict = field(default_factory=dict)
    doc: str = ""


# ------------------------------------------------------------- operations

def _ramsey_limits(n, omega, t):
    psi_css = ramsey.css(n, np.pi / 2, 0.0)
    psi_ghz = ramsey.ghz(n)
    return (ramsey.css_snr(n, omega, t), ramsey.ghz_snr(n, omega, t),
            ramsey.qfi_rotation(psi_css, t), ramsey.qfi_rotation(psi_ghz, t))


def _ramsey_twist(n, chi, t, kind="two_axis"):
    row = ramsey.snr_tradeoff_curve(n, chi, [t], kind=kind)[0]
    return tuple(row[1:])


def _lz_ground(omega, coupling):
    p = lz.LzParams(omega, coupling)
    return lz.qfi_ground(p), lz.snr_sigmaz(p), lz.effective_qfi(p) if omega != 0 else math.nan


def _lz_thermal(omega, coupling, temperature):
    p = lz.LzParams(omega, coupling, temperature)
    q = lz.qfi_thermal(p)
    return (q.total, q.population_term, q.weight * q.ground_qfi, lz.snr_sigmaz_thermal(p),
            lz.thermal_determinant(p), lz.multiparameter_qfi(p))


def _tfim_qfi(n_spins, omega, coupling):
    p = tfim.TfimParams(n_spins, omega, coupling)
    return tfim.qfi(p), tfim.qfi_critical_closed_form(p.n_spins, omega), tfim.gap(p)


def _tfim_snr(n_spins, omega, coupling):
    p = tfim.TfimParams(n_spins, omega, coupling)
    return (tfim.qfi(p), tfim.magnetization_z(p), tfim.local_snr(p), tfim.collective_snr(p),
            math.log(p.n_spins) ** 2)


def _tfim_adiabatic(n_spins, omega, coupling, gamma):
    p = tfim.TfimParams(n_spins, omega, coupling)
    return tfim.adiabatic_time(p, gamma), tfim.adiabatic_qfi(p, gamma), tfim.qfi(p)


def _tfim_exact(n_spins, omega, coupling, omega_prime):
    p = tfim.TfimParams(n_spins, omega, coupling)
    ed = tfim.exact_observables(p, omega_prime)
    corr = np.array([tfim.two_point_zz(p, r) for r in range(1, p.n_spins)])
    return (ed.qfi, tfim.qfi(p), ed.magnetization_z, tfim.magnetization_z_signed(p),
            float(np.max(np.abs(ed.correlations - corr))), ed.fidelity, tfim.fidelity(p, omega_prime))


def _lmg_eigenstate(n_spins, omega, coupling, level):
    r = lmg.eigenstate_response(lmg.LmgParams(n_spins, omega, coupling), level)
    snr = r.snr if r.sz_variance > 1e-14 else math.nan
    return r.qfi, snr, r.sz_variance, r.excluded_pairs


def _lmg_optimum(n_spins, omega, level, lo, hi):
    return lmg.optimal_coupling(n_spins, omega, level, bounds=(lo, hi), grid_points=29)


def _lmg_quench(omega, coupling, t):
    return lmg.quench_qfi(omega, coupling, t), lmg.quench_photons(omega, coupling, t)


def _lmg_fock(n_level, omega, coupling):
    return (lmg.squeezed_fock_qfi(n_level, omega, coupling),)


def _osc_qfi(omega, coupling):
    p = osc.OscillatorParams(omega, coupling)
    snr_n = osc.snr_number(p) if coupling != 0 else 0.0
    return osc.xi(p), osc.qfi_ho(p), osc.vacuum_excitations(p), snr_n, osc.snr_quadrature(p)


def _osc_budget(omega, coupling, gamma):
    return osc.adiabatic_budget(osc.OscillatorParams(omega, coupling), gamma)


def _usc_qfi(omega, qubit_splitting, coupling, drive, decay, detuning):
    p = osc.UscParams.at_detuning(omega, qubit_splitting, coupling, drive, decay, detuning)
    q = osc.usc_qfi_omega(p)
    printed = osc.usc_qfi_near_critical(p)[2]
    return (coupling / osc.critical_coupling(omega, qubit_splitting), osc.usc_renormalized_frequency(p),
            osc.usc_photon_number(p), q.amplitude_part, q.phase_part, q.total, q.enhancement_e4xi, printed)


def _kerr_steady(detuning, pump, damping):
    p = kerr.KerrParams(detuning, pump, damping)
    hc = kerr.homodyne_check(p)
    return kerr.steady_photons(p), kerr.qfi_steady(p), hc.qfi, hc.fisher, hc.ratio


def _kerr_dynamics(detuning, pump, damping, t):
    p = kerr.KerrParams(detuning, pump, damping)
    hc = kerr.homodyne_check(p, t)
    n = kerr.photon_number_t(p, t)
    return n, hc.qfi, hc.fisher, hc.ratio, kerr.unitary_scaling_reference(n, t)


def _kerr_optimal(damping, n_max):
    o = kerr.optimal_protocol(kerr.KerrParams(damping, 0.0, damping, n_max))
    return o.pump, o.time, o.qfi_single, o.qfi_rate, o.qfi_single_asymptotic


def _mrlm_occupation(dot_level, hybridization, temperature):
    p = mrlm.MrlmParams(dot_level, hybridization, temperature)
    r = mrlm.qfi_detail(p)
    return r.occupation, r.qfi, mrlm.crossover_scale(p)


REGISTRY = {
    "ramsey": {
        "limits": Operation(_ramsey_limits, ("n", "omega", "t"),
                            ("css_snr", "ghz_snr", "css_qfi", "ghz_qfi"), {"omega": 0.0, "t": 1.0},
                            "CSS and GHZ Ramsey SNR and rotation QFI"),
        "twist": Operation(_ramsey_twist, ("n", "chi", "t"), ("signal2", "noise", "snr"),
                           {"chi": 1.0}, "two-axis twisting signal, noise and SNR at time t"),
    },
    "lz": {
        "qfi": Operation(_lz_ground, ("omega", "coupling"), ("qfi", "snr_sigmaz", "qfi_ratio"),
                         {"omega": 1.0}, "ground-state QFI, sigma_z SNR and ratio-parameter QFI"),
        "thermal": Operation(_lz_thermal, ("omega", "coupling", "temperature"),
                             ("qfi", "population_part", "coherent_part", "snr_sigmaz", "qfim_det",
                              "qfi_multiparameter"), {"omega": 1.0}, "Gibbs-state QFI and QFIM"),
    },
    "tfim": {
        "qfi": Operation(_tfim_qfi, ("n_spins", "omega", "coupling"),
                         ("qfi", "critical_closed_form", "gap"), {"omega": 1.0, "coupling": 1.0},
                         "momentum-space ground-state QFI"),
        "snr": Operation(_tfim_snr, ("n_spins", "omega", "coupling"),
                         ("qfi", "magnetization", "local_snr", "collective_snr", "log_n_squared"),
                         {"omega": 1.0, "coupling": 1.0}, "local and collective magnetisation SNR"),
        "exact": Operation(_tfim_exact, ("n_spins", "omega", "coupling", "omega_prime"),
                           ("qfi_exact", "qfi", "sz_exact", "sz", "max_correlation_gap", "fidelity_exact",
                            "fidelity"), {"n_spins": 8, "omega": 1.0, "coupling": 1.0, "omega_prime": 1.05},
                           "brute-force diagonalisation against the momentum-space solution"),
        "adiabatic": Operation(_tfim_adiabatic, ("n_spins", "omega", "coupling", "gamma"),
                               ("time", "qfi_adiabatic", "qfi"), {"omega": 1.0, "coupling": 1.0},
                               "adiabatic ramp time and the QFI written through it"),
    },
    "lmg": {
        "eigenstate": Operation(_lmg_eigenstate, ("n_spins", "omega", "coupling", "level"),
                                ("qfi", "snr_sz", "sz_variance", "excluded_pairs"),
                                {"omega": 1.0, "level": 0}, "eigenstate QFI and S_z SNR"),
        "optimum": Operation(_lmg_optimum, ("n_spins", "omega", "level", "lo", "hi"),
                             ("coupling", "qfi"), {"omega": 1.0, "level": 0, "lo": 0.0, "hi": 4.0},
                             "coupling that maximises an eigenstate's QFI (bounds in units of omega)"),
        "quench": Operation(_lmg_quench, ("omega", "coupling", "t"), ("qfi", "photons"),
                            {"omega": 1.0}, "thermodynamic-limit quench QFI and photons"),
        "fock": Operation(_lmg_fock, ("n_level", "omega", "coupling"), ("qfi",), {"omega": 1.0},
                          "squeezed Fock state QFI"),
    },
    "oscillator": {
        "qfi": Operation(_osc_qfi, ("omega", "coupling"),
                         ("xi", "qfi", "photons", "snr_number", "snr_quadrature"), {"omega": 1.0},
                         "squeezed-vacuum QFI, excitations and readout SNRs"),
        "budget": Operation(_osc_budget, ("omega", "coupling", "gamma"),
                            ("time", "qfi_rewritten", "sql_crossover"), {"omega": 1.0},
                            "adiabatic preparation time accounting"),
    },
    "usc": {
        "qfi": Operation(_usc_qfi, ("omega", "qubit_splitting", "coupling", "drive", "decay", "detuning"),
                         ("coupling_ratio", "frequency", "photons", "amplitude_part", "phase_part",
                          "qfi", "enhancement", "qfi_near_critical"),
                         {"omega": 1.0, "drive": 1.0, "decay": 1.0, "detuning": 1.0},
                         "driven dispersive Rabi steady-state QFI"),
    },
    "kerr": {
        "steady": Operation(_kerr_steady, ("detuning", "pump", "damping"),
                            ("photons", "qfi", "qfi_gaussian", "homodyne_fi", "ratio"),
                            {"detuning": 1.0, "damping": 1.0}, "steady-state QFI and homodyne FI"),
        "dynamics": Operation(_kerr_dynamics, ("detuning", "pump", "damping", "t"),
                              ("photons", "qfi", "homodyne_fi", "ratio", "unitary_reference"),
                              {"detuning": 1.0, "damping": 0.0}, "transient QFI from vacuum"),
        "optimal": Operation(_kerr_optimal, ("damping", "n_max"),
                             ("pump", "time", "qfi_single", "qfi_rate", "qfi_asymptotic"),
                             {"damping": 1.0}, "photon-capped optimal protocol"),
    },
    "mrlm": {
        "occupation": Operation(_mrlm_occupation, ("dot_level", "hybridization", "temperature"),
                                ("occupation", "qfi", "crossover_scale"), {"hybridization": 1.0},
                                "dot occupation and QFI for the dot level"),
    },
}


def describe():
    """Human-readable list of models, operations and their parameters."""
    lines = []
    for model, ops in REGISTRY.items():
        for name, op in ops.items():
            params = " ".join(f"--{k}" + (f"={op.defaults[k]}" if k in op.defaults else "") for k in op.params)
            lines.append(f"{model} {name}: {op.doc}\n    {params}")
    return "\n".join(lines)


# ------------------------------------------------------------------ config

@dataclass
class ExperimentConfig:
    model: str
    operation: str
    bindings: dict
    out: str = None
    format: str = "csv"
    workers: int = 1
    strict: bool = False
    seed: int = 0

    def echo(self):
        """Config echo for metadata; the worker count is left out so output is worker-independent."""
        def show(v):
            if isinstance(v, Grid):
                return v.spec()
            if isinstance(v, (list, tuple, np.ndarray)):
                return [float(x) for x in v]
            return v
        binds = {k: show(v) for k, v in sorted(self.bindings.items())}
        return {"model": self.model, "operation": self.operation, "bindings": binds,
                "format": self.format, "strict": self.strict, "seed": self.seed}


def lookup(model, operation):
    if model not in REGISTRY:
        raise ValidationError(f"unknown model {model!r}; choose from {', '.join(REGISTRY)}")
    ops = REGISTRY[model]
    if operation not in ops:
        raise ValidationError(f"unknown operation {operation!r} for {model}; choose from {', '.join(ops)}")
    return ops[operation]


def _axis_values(name, binding, model):
    if isinstance(binding, Grid):
        vals = binding.values()
    elif isinstance(binding, (list, tuple, np.ndarray)):
        vals = np.array(binding, dtype=float)
    else:
        vals = np.array([binding], dtype=float)
    vals = np.asarray(vals, dtype=float)
    if vals.size == 0:
        raise ValidationError(f"grid for {name} is empty")
    if name in INTEGER_PARAMS:
        ints = np.rint(vals).astype(int)
        if model == "tfim" and name == "n_spins":
            ints = 2 * np.rint(vals / 2.0).astype(int)
        # keep first occurrences so rounded log grids do not repeat sizes
        _, first = np.unique(ints, return_index=True)
        return [int(v) for v in ints[np.sort(first)]]
    return [float(v) for v in vals]


def expand(config):
    """Parameter names and the list of parameter tuples in lexicographic grid order."""
    op = lookup(config.model, config.operation)
    unknown = set(config.bindings) - set(op.params)
    if unknown:
        raise ValidationError(f"unknown parameter(s) {', '.join(sorted(unknown))}; "
                              f"{config.model} {config.operation} takes {', '.join(op.params)}")
    axes = []
    for name in op.params:
        if name in config.bindings:
            axes.append(_axis_values(name, config.bindings[name], config.model))
        elif name in op.defaults:
            axes.append(_axis_values(name, op.defaults[name], config.model))
        else:
            raise ValidationError(f"missing required parameter --{name}")
    return op.params, list(itertools.product(*axes))


@dataclass
class ResultTable:
    columns: list
    rows: list
    meta: dict
    wall_time: float = 0.0

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def _evaluate(args):
    model, operation, names, values, strict = args
    op = REGISTRY[model][operation]
    try:
        out = op.func(**dict(zip(names, values)))
        return tuple(float(v) for v in out), ""
    except CritmetError as exc:
        if strict:
            raise
        return tuple(math.nan for _ in op.columns), f"{type(exc).__name__}: {exc}"


def run(config):
    """Evaluate an operation over its grid; rows come back in grid order."""
    op = lookup(config.model, config.operation)
    names, points = expand(config)
    start = time.perf_counter()
    jobs = [(config.model, config.operation, names, pt, config.strict) for pt in points]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
    else:
        results = [_evaluate(j) for j in jobs]
    rows = [list(pt) + list(vals) + [err] for pt, (vals, err) in zip(points, results)]
    meta = {"config": config.echo(), "version": __version__, "fits": {}}
    return ResultTable(list(names) + list(op.columns) + ["error"], rows, meta,
                       time.perf_counter() - start)


def fit(table, x_col, y_col, kind="loglog"):
    """Power-law (or linear) fit of two columns, stored in the table metadata."""
    for c in (x_col, y_col):
        if c not in table.columns:
            raise ValidationError(f"no column {c!r}; have {', '.join(table.columns)}")
    x, y = table.column(x_col), table.column(y_col)
    ok = np.isfinite(x) & np.isfinite(y)
    if kind == "loglog":
        res = loglog_fit(x[ok], y[ok])
        entry = {"exponent": res.exponent, "prefactor": res.prefactor, "r_squared": res.r_squared}
    elif kind == "linear":
        slope, intercept, r2 = linear_fit(x[ok], y[ok])
        entry = {"slope": slope, "intercept": intercept, "r_squared": r2}
    else:
        raise ValidationError("fit kind must be loglog or linear")
    table.meta["fits"][f"{y_col}~{x_col}:{kind}"] = entry
    return entry


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def render(table, fmt="csv"):
    """Serialise a table to text (CSV with 17 significant digits, or JSON)."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v
        rows = [[clean(v) for v in row] for row in table.rows]
        return json.dumps({"meta": table.meta, "columns": table.columns, "rows": rows},
                          indent=1, sort_keys=True) + "\n"
    raise ValidationError("format must be csv or json")


def emit(table, fmt, path):
    """Write a table to path.  The CSV gets a sidecar <path>.meta.json with the metadata."""
    text = render(table, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if fmt == "csv":
            with open(str(path) + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(table.meta, indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text
