"""Figure rendering for the CLI report path (headless, files only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_scaling_figure(
    path, points, fit=None, xlabel="", ylabel="", title="", extra_curves=None
):
    """Log-log scatter of (x, value) points with an optional fitted line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    pts = [(x, v) for x, v in points if v > 0]
    if pts:
        xs, ys = zip(*pts)
        ax.loglog(xs, ys, "o", ms=4, label="data")
        if fit is not None and np.isfinite(fit.slope):
            xs_arr = np.asarray(xs)
            line = np.exp(fit.intercept) * xs_arr**fit.slope
            ax.loglog(xs_arr, line, "-", lw=1,
                      label=f"slope {fit.slope:.3f} (r2 {fit.r_squared:.3f})")
    for name, curve in (extra_curves or {}).items():
        cp = [(x, v) for x, v in curve if v > 0]
        if cp and cp != pts:
            xs, ys = zip(*cp)
            ax.loglog(xs, ys, "--", lw=1, alpha=0.7, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8)
    _finish(fig, path)


def save_curves_figure(
    path, curves, xlabel="", ylabel="", title="", loglog=False, logy=False
):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for name, curve in curves.items():
        if not curve:
            continue
        xs, ys = zip(*curve)
        if loglog:
            ax.loglog(xs, ys, lw=1, label=name)
        elif logy:
            ax.semilogy(xs, ys, "o-", lw=1, label=name)
        else:
            ax.plot(xs, ys, lw=1, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(curves) <= 12:
        ax.legend(fontsize=7)
    _finish(fig, path)


def save_histogram(path, values, xlabel="", title=""):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.hist(values, bins=min(64, max(8, len(values) // 4)))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    _finish(fig, path)
