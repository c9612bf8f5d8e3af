"""Figure rendering for run reports.

One PNG per experiment, drawn from the same curve rows that go into
curves.csv (plus fit lines from the summary), written next to it.
"""

from __future__ import annotations

import os

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .report import RunReport  # noqa: E402

_FLOOR = 1e-18  # log-scale guard for exact zeros


def _rows(report: RunReport, units: str):
    return [row for row in report.curves if row.units == units]


def _fig_wavetrain(report: RunReport):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    rows = _rows(report, "sup_deviation")
    for q in sorted({row.epsilon_or_k for row in rows}):
        pts = [(row.time_or_order, row.value) for row in rows if row.epsilon_or_k == q]
        ts, vals = zip(*sorted(pts))
        ax.semilogy(ts, np.maximum(vals, _FLOOR), marker=".", label=f"q = {q:g}")
    ax.axhline(report.summary["tolerance"], color="k", ls="--", lw=0.8, label="tolerance")
    ax.set_xlabel("t")
    ax.set_ylabel("sup deviation of (|A|, B)")
    ax.set_title("Wave-train invariance")
    ax.legend()
    return fig


def _fig_residual_order(report: RunReport):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    styles = {"res_u_norm": "o-", "res_r_norm": "s--"}
    for units, style in styles.items():
        rows = _rows(report, units)
        for order in sorted({int(row.time_or_order) for row in rows}):
            pts = [
                (row.epsilon_or_k, row.value)
                for row in rows
                if int(row.time_or_order) == order
            ]
            eps, vals = zip(*sorted(pts))
            ax.loglog(eps, np.maximum(vals, _FLOOR), style, label=f"order {order}, {units}")
    for order, fit in report.summary["fits"].items():
        label = f"order {order}: slope {fit['slope']:.2f}"
        ax.plot([], [], " ", label=label)
    ax.set_xlabel("epsilon")
    ax.set_ylabel("max scaled-residual norm")
    ax.set_title("Residual order")
    ax.legend(fontsize=8)
    return fig


def _fig_error_scaling(report: RunReport):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11.0, 4.5))
    rows = _rows(report, "sup_error")
    eps_values = sorted({row.epsilon_or_k for row in rows}, reverse=True)
    for eps in eps_values:
        pts = [(row.time_or_order, row.value) for row in rows if row.epsilon_or_k == eps]
        ts, vals = zip(*sorted(pts))
        ax1.semilogy(
            np.asarray(ts) * eps, np.maximum(vals, _FLOOR), label=f"eps = {eps:g}"
        )
    ax1.set_xlabel("slow time T = eps t")
    ax1.set_ylabel("sup error")
    ax1.set_title("Error growth")
    ax1.legend()

    maxima = [
        (eps, max(row.value for row in rows if row.epsilon_or_k == eps))
        for eps in eps_values
    ]
    eps_arr = np.array([e for e, _ in maxima])
    err_arr = np.array([max(v, _FLOOR) for _, v in maxima])
    ax2.loglog(eps_arr, err_arr, "o", label="max error")
    fit = report.summary.get("fit")
    if fit:
        line = np.exp(fit["intercept"]) * eps_arr ** fit["slope"]
        ax2.loglog(eps_arr, line, "--", label=f"slope {fit['slope']:.2f}")
    ax2.set_xlabel("epsilon")
    ax2.set_ylabel("max sup error")
    ax2.set_title("Error scaling")
    ax2.legend()
    return fig


def _fig_spectral(report: RunReport):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11.0, 4.5))
    for units, ax, ylabel in (
        ("re_lambda", ax1, "Re lambda"),
        ("im_lambda", ax2, "Im lambda"),
    ):
        rows = _rows(report, units)
        for branch in range(3):
            pts = [
                (row.epsilon_or_k, row.value)
                for row in rows
                if int(row.time_or_order) == branch
            ]
            ks, vals = zip(*sorted(pts))
            ax.plot(ks, vals, label=f"branch {branch}")
        ax.set_xlabel("k")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize=8)
    damping = {int(r.epsilon_or_k): r.value for r in _rows(report, "damping_constant")}
    if len(damping) == 3:
        ks = np.linspace(-10.0, 10.0, 401)
        env = -damping[0] + damping[1] * np.abs(ks) - damping[2] * ks**2
        ax1.plot(ks, env, "k--", lw=0.8, label="damping envelope")
        ax1.legend(fontsize=8)
    ax1.set_title("Linearization spectrum")
    ax2.set_title("Dispersion")
    return fig


def _fig_classify(report: RunReport):
    rows = _rows(report, "class_code")
    alphas = sorted({row.epsilon_or_k for row in rows})
    ds = sorted({row.time_or_order for row in rows})
    grid = np.full((len(ds), len(alphas)), np.nan)
    ai = {a: i for i, a in enumerate(alphas)}
    di = {d: i for i, d in enumerate(ds)}
    for row in rows:
        grid[di[row.time_or_order], ai[row.epsilon_or_k]] = row.value
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    cmap = matplotlib.colors.ListedColormap(["#4878d0", "#d65f5f", "#eeeeee"])
    mesh = ax.pcolormesh(
        alphas, ds, grid, cmap=cmap, vmin=-0.5, vmax=2.5, shading="nearest"
    )
    cbar = fig.colorbar(mesh, ticks=[0, 1, 2])
    cbar.ax.set_yticklabels(["hyperbolic", "elliptic", "degenerate"])
    ax.set_xlabel("alpha")
    ax.set_ylabel("d")
    frac = report.summary["agreement_fraction"]
    ax.set_title(f"Long-wave classification (oracle agreement {frac:.1%})")
    return fig


_RENDERERS = {
    "wavetrain-invariance": _fig_wavetrain,
    "residual-order": _fig_residual_order,
    "error-scaling": _fig_error_scaling,
    "spectral-report": _fig_spectral,
    "classify-sweep": _fig_classify,
}


def render_figures(report: RunReport, out_dir: str) -> list:
    """Write the experiment's figure(s) into out_dir, returning the paths."""
    renderer = _RENDERERS[report.experiment]
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{report.experiment}.png")
    fig = renderer(report)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
