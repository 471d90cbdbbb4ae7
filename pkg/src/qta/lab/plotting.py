"""Matplotlib figures written next to the tabular outputs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

MEAN_COLOR = "tab:blue"
STD_COLOR = "gold"

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 100,
}


def _new(width=6.0, height=3.6):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    # No Software/date metadata, so identical data gives identical bytes.
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_probabilities(traj, path, labels=None):
    p = traj.probabilities if hasattr(traj, "probabilities") else np.asarray(traj)
    fig, ax = _new()
    for i in range(p.shape[1]):
        ax.plot(p[:, i], lw=1, label=labels[i] if labels else None)
    ax.set_xlabel("step")
    ax.set_ylabel("probability")
    if labels and len(labels) <= 16:
        ax.legend(ncol=4, frameon=False)
    _save(fig, path)


def plot_spectrum(report, path):
    fig, ax = _new()
    ax.stem(report.frequencies[1:], report.power[1:], basefmt=" ")
    for k in report.dominant:
        ax.axvline(k, color="tab:red", lw=0.6, ls=":")
    ax.set_xlabel("DFT bin")
    ax.set_ylabel("power")
    _save(fig, path)


def plot_l2(series, path, log=True):
    """One curve per row of ``series`` (e.g. per operator)."""
    s = np.atleast_2d(series)
    fig, ax = _new()
    steps = np.arange(s.shape[1])
    for row in s:
        ax.plot(steps, row, lw=0.7, alpha=0.7)
    if log and np.any(s > 0):
        ax.set_yscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel(r"$\|p(t) - \bar p\|_2$")
    _save(fig, path)


def plot_group_stats(summaries, quantity: str, path, xlabel: str):
    """Bar chart of per-group means with the population std overlaid."""
    keys = [s.key for s in summaries]
    means = [getattr(s, f"mean_{quantity}") for s in summaries]
    stds = [getattr(s, f"std_{quantity}") for s in summaries]
    fig, ax = _new(7.0, 3.6)
    ax.bar(keys, means, color=MEAN_COLOR, width=0.8, label="mean")
    ax.bar(keys, stds, color=STD_COLOR, width=0.5, label="std")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(quantity.replace("_", " "))
    ax.legend(frameon=False)
    _save(fig, path)


def plot_fit(xs, ys, fit, path):
    x = np.where(np.asarray(xs) == 0, 1.0, xs)
    y = np.where(np.asarray(ys) == 0, 1.0, ys)
    lx, ly = np.log(x), np.log(y)
    fig, ax = _new(4.5, 3.6)
    ax.scatter(lx, ly, s=10, color=MEAN_COLOR)
    grid = np.linspace(lx.min(), lx.max(), 50)
    ax.plot(grid, fit.intercept + fit.slope * grid, color="tab:red", lw=1,
            label=f"slope {fit.slope:.3g}, $R^2$ = {fit.r_squared:.3f}")
    ax.set_xlabel(f"ln {fit.x_label}")
    ax.set_ylabel(f"ln {fit.y_label}")
    ax.legend(frameon=False)
    _save(fig, path)


def plot_ergodic(conv, path):
    fig, ax = _new()
    ax.loglog(conv.n, conv.error, lw=1, label="error")
    if conv.constant > 0:
        ax.loglog(conv.n, conv.bound, lw=1, ls="--", label="C/N")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$\|A_N x - P x\|$")
    ax.legend(frameon=False)
    _save(fig, path)
