"""Static figures for a sweep, rendered off-screen next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
_NO_META = {"Software": None}


def _finite(values):
    v = np.asarray(values, dtype=float)
    return np.isfinite(v).any()


def convergence_figure(result):
    rows = result.per_scale
    ns = np.array([r.n for r in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    sup = np.array([r.sup_error for r in rows])
    pos = sup > 0
    ax.loglog(ns[pos], sup[pos], "o-", label="sup error")
    mean = np.array([r.mean_error for r in rows])
    ax.loglog(ns[mean > 0], mean[mean > 0], "s-", label="mean error")
    for attr, label, ls in (("bound_t3", "bound T3", "--"), ("bound_t4", "bound T4", ":"),
                            ("bound_t6", "bound T6", "-.")):
        vals = np.array([getattr(r, attr) for r in rows])
        if _finite(vals):
            ax.loglog(ns, vals, ls, color="0.4", label=label)
    if result.rate is not None:
        fit = np.exp(result.rate.intercept) * ns ** result.rate.slope
        ax.loglog(ns, fit, color="C3", lw=0.8,
                  label=f"fit slope {result.rate.slope:.2f}")
    cfg = result.config
    ax.set_xlabel("n")
    ax.set_ylabel("error")
    ax.set_title(f"{cfg.operator_family}, {cfg.kernel_name} kernel, {cfg.function_name}")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def profile_figure(result):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    grid = result.grid
    for n, err in result.profiles.items():
        if isinstance(grid, list):
            # multivariate: error along the diagonal of the tensor grid
            idx = np.arange(min(err.shape))
            x, e = grid[0][idx], err[tuple(idx for _ in grid)]
        else:
            x, e = grid, err
        e = np.where(e > 0, e, np.nan)
        ax.semilogy(x, e, lw=0.9, label=f"n = {n:g}")
    ax.set_xscale("log")
    ax.set_xlabel("x")
    ax.set_ylabel("|operator - f|")
    ax.legend(frameon=False, ncol=2)
    fig.tight_layout()
    return fig


def render_figures(result, out_dir) -> list[Path]:
    out = Path(out_dir)
    paths = []
    with plt.rc_context(STYLE):
        for name, build in (("convergence.png", convergence_figure),
                            ("error_profile.png", profile_figure)):
            fig = build(result)
            path = out / name
            fig.savefig(path, dpi=120, metadata=_NO_META)
            plt.close(fig)
            paths.append(path)
    return paths
