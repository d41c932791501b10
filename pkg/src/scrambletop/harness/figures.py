"""Matplotlib rendering of the emitted maps and series to PNG files.

File output only (Agg backend); the CSV/PGM twins remain the quantitative
record, the PNGs are for quick inspection.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 4.0),
        "figure.dpi": 150,
        "font.size": 9,
        "axes.linewidth": 0.6,
    }
)


def save_heatmap(
    path: Path,
    thetas: np.ndarray,
    phis: np.ndarray,
    matrix: np.ndarray,
    label: str,
    title: str = "",
    log_scale: bool = False,
) -> Path:
    fig, ax = plt.subplots()
    log_ok = log_scale and matrix.min() > 0 and matrix.min() < matrix.max()
    norm = LogNorm(vmin=matrix.min(), vmax=matrix.max()) if log_ok else None
    mesh = ax.imshow(
        matrix,
        origin="lower",
        aspect="auto",
        extent=(phis[0], phis[-1] + (phis[1] - phis[0]), thetas[0], thetas[-1]),
        cmap="viridis",
        norm=norm,
    )
    ax.set_xlabel(r"$\phi$ (rad)")
    ax.set_ylabel(r"$\theta$ (rad)")
    if title:
        ax.set_title(title)
    fig.colorbar(mesh, ax=ax, label=label)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def save_series(
    path: Path,
    x: np.ndarray,
    series: dict[str, np.ndarray],
    xlabel: str,
    ylabel: str,
    title: str = "",
    log_y: bool = False,
) -> Path:
    fig, ax = plt.subplots()
    for name, values in series.items():
        ax.plot(x, values, lw=1.0, label=name)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
