"""Quick-look figures for result tables (Agg backend, PNG next to the data)."""
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
FIG_WIDTH = 6.4
CYCLE = ["#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9", "#000000", "#f0e442"]

STYLE = {
    "font.family": "serif",
    "mathtext.fontset": "cm",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.prop_cycle": matplotlib.cycler(color=CYCLE),
    "savefig.dpi": 150,
}


def _positive(v):
    v = v[np.isfinite(v)]
    return v.size > 0 and np.all(v > 0)


def _spread(v):
    v = v[np.isfinite(v) & (v > 0)]
    return v.size > 1 and v.max() / v.min() > 50


def sweep_axis(table, n_params):
    """Name of the first parameter column that actually varies, or None."""
    for name in table.columns[:n_params]:
        try:
            col = table.column(name)
        except ValueError:
            continue
        if np.unique(col[np.isfinite(col)]).size > 1:
            return name
    return None


def plot_table(table, x, ys, path, title=None):
    """One panel per output column against x; log axes where the data span decades."""
    xv = table.column(x)
    order = np.argsort(xv, kind="stable")
    with plt.rc_context(STYLE):
        n = len(ys)
        cols = min(n, 3)
        rows = int(math.ceil(n / cols))
        fig, axes = plt.subplots(rows, cols, figsize=(FIG_WIDTH, FIG_WIDTH * GOLDEN * rows / max(1, cols - 1)),
                                 squeeze=False)
        for i, (ax, y) in enumerate(zip(axes.flat, ys)):
            yv = table.column(y)
            ax.plot(xv[order], yv[order], marker="o", ms=2.5, lw=1, color=CYCLE[i % len(CYCLE)])
            if _positive(xv) and _spread(xv):
                ax.set_xscale("log")
            if _positive(yv) and _spread(yv):
                ax.set_yscale("log")
            ax.set_xlabel(x.replace("_", " "))
            ax.set_ylabel(y.replace("_", " "))
        for ax in list(axes.flat)[n:]:
            ax.axis("off")
        if title:
            fig.suptitle(title, fontsize=10)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path


def auto_plot(table, n_params, path):
    """Plot every numeric output against the first varying parameter; None if nothing varies."""
    x = sweep_axis(table, n_params)
    if x is None:
        return None
    ys = [c for c in table.columns[n_params:] if c != "error" and np.any(np.isfinite(table.column(c)))]
    if not ys:
        return None
    cfg = table.meta.get("config", {})
    title = f"{cfg.get('model', '')} {cfg.get('operation', '')}".strip() or None
    return plot_table(table, x, ys, path, title)
