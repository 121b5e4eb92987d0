"""Figure rendering for the CLI report path.

Each function takes a computed result and writes one PNG next to the
delimited output.  Figures are diagnostic companions of the reports, not a
data format: the numbers of record live in the JSON/CSV files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.set_title(title, fontsize=11)
    ax.set_xlabel(xlabel, fontsize=10)
    ax.set_ylabel(ylabel, fontsize=10)
    ax.grid(True, alpha=0.3, linewidth=0.5)
    return fig, ax


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def save_range_figure(sample, path):
    """Scatter of sampled range values in the complex plane."""
    vals = np.array([complex(v) for v, _ in sample.points])
    fig, ax = _new_axes(f"{sample.kind} sample ({len(vals)} points)", "Re", "Im")
    mags = np.abs(vals)
    sc = ax.scatter(vals.real, vals.imag, c=mags, s=14, cmap="viridis", alpha=0.85)
    fig.colorbar(sc, ax=ax, label="|value|")
    ax.axhline(0.0, color="k", linewidth=0.5, alpha=0.4)
    ax.axvline(0.0, color="k", linewidth=0.5, alpha=0.4)
    return _finish(fig, path)


def save_profile_figure(profile, path, gnorm_value=None):
    """delta -> s(delta), log-x, with the limiting value when known."""
    deltas = np.array([d for d, _ in profile.entries])
    svals = np.array([s for _, s in profile.entries])
    fig, ax = _new_axes("relaxation profile", r"$\delta$", r"$s(\delta)$")
    ax.semilogx(deltas, svals, "o-", ms=3.5, lw=1.0)
    if gnorm_value is not None:
        ax.axhline(gnorm_value, color="tab:red", lw=0.8, ls="--", label="G-norm")
        ax.legend(fontsize=9)
    ax.invert_xaxis()
    return _finish(fig, path)


def save_modulus_figure(modulus, path):
    """Comparison modulus phi_hat against the diagonal."""
    t = np.array([a for a, _ in modulus.grid])
    phi = np.array([b for _, b in modulus.grid])
    fig, ax = _new_axes("comparison modulus", "t", r"$\hat\phi(t)$")
    ax.plot(t, phi, "o-", ms=4, lw=1.0, label=r"$\hat\phi$")
    ax.plot([0, 1], [0, 1], color="gray", lw=0.7, ls=":", label="t")
    ax.set_xlim(0.0, 1.02)
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=9, loc="lower right")
    return _finish(fig, path)


def save_hilbert_figure(analysis, path):
    """Singular spectrum plus the distance-concentration bound check."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 3.8))
    svals = (
        analysis.buckets["one"] + analysis.buckets["interior"] + analysis.buckets["zero"]
    )
    ax1.stem([float(v) for v in svals])
    ax1.axhline(1.0, color="tab:red", lw=0.7, ls="--")
    ax1.set_title("singular values", fontsize=11)
    ax1.set_xlabel("index", fontsize=10)
    ax1.grid(True, alpha=0.3, linewidth=0.5)

    deltas = [d for d, _, _ in analysis.dist_records]
    dists = [m for _, m, _ in analysis.dist_records]
    bounds = [b for _, _, b in analysis.dist_records]
    ax2.loglog(deltas, bounds, "s--", ms=4, lw=0.9, label="bound")
    ax2.loglog(deltas, np.maximum(dists, 1e-300), "o-", ms=4, lw=0.9, label="max dist")
    ax2.set_title(f"concentration near E (gamma={analysis.gamma:.3g})", fontsize=11)
    ax2.set_xlabel(r"$\delta$", fontsize=10)
    ax2.legend(fontsize=9)
    ax2.grid(True, alpha=0.3, linewidth=0.5)
    return _finish(fig, path)


def save_spectrum_figure(values, path, title="deck gaps"):
    """Bar chart of per-operator gaps from a spear/index deck."""
    fig, ax = _new_axes(title, "deck index", "gap")
    ax.bar(np.arange(len(values)), values, width=0.8)
    ax.axhline(0.0, color="k", lw=0.6)
    return _finish(fig, path)
