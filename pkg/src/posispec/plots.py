"""Figure rendering for reports: written to files, never shown interactively."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .operators import Operator
from .spectral import Spectrum


def save_spectrum_figure(spectrum: Spectrum, path, title: str = "",
                         disk_epsilon: Optional[float] = None) -> Path:
    """Eigenvalues in the complex plane with the unit and peripheral circles."""
    fig, ax = plt.subplots(figsize=(5, 5))
    theta = np.linspace(0, 2 * np.pi, 361)
    ax.plot(np.cos(theta), np.sin(theta), ls="--", lw=0.8, color="gray",
            label="unit circle")
    if abs(spectrum.spr - 1.0) > 1e-9 and spectrum.spr > 0:
        ax.plot(spectrum.spr * np.cos(theta), spectrum.spr * np.sin(theta),
                ls=":", lw=0.8, color="tab:orange", label="spr circle")
    if disk_epsilon is not None and spectrum.spr >= disk_epsilon >= 0:
        r = spectrum.spr - disk_epsilon
        ax.plot(disk_epsilon + r * np.cos(theta), r * np.sin(theta),
                lw=0.8, color="tab:green", label="domination disk")
    values = spectrum.values
    sizes = [30 + 20 * (e.multiplicity - 1) for e in spectrum.entries]
    ax.scatter([v.real for v in values], [v.imag for v in values],
               s=sizes, color="tab:blue", zorder=3, label="eigenvalues")
    ax.axhline(0, lw=0.4, color="black")
    ax.axvline(0, lw=0.4, color="black")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(title or "spectrum")
    ax.legend(loc="upper left", fontsize=7)
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def save_convergence_figure(residuals: Sequence[float], path,
                            title: str = "") -> Path:
    """Power-increment residuals ``||T^(k+1) - T^k||`` on a log axis."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ks = np.arange(1, len(residuals) + 1)
    ax.semilogy(ks, residuals, lw=1.0)
    ax.set_xlabel("k")
    ax.set_ylabel("power increment (sup norm)")
    ax.set_title(title or "power convergence")
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def save_matrix_figure(T: Operator, path, title: str = "") -> Path:
    """Heatmap of the matrix entries."""
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.imshow(T.matrix, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(title or T.label or "operator")
    ax.set_xlabel("source index")
    ax.set_ylabel("target index")
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def power_residual_trace(T: Operator, k_max: int) -> list:
    """Residual sequence used by the convergence figure."""
    residuals = []
    power = np.eye(T.dim)
    for _ in range(k_max):
        nxt = power @ T.matrix
        residuals.append(float(np.abs(nxt - power).max()))
        power = nxt
        if residuals[-1] <= 1e-14 or residuals[-1] > 1e12:
            break
    return residuals
