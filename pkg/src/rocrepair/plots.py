"""Figure rendering for curves, reports and recovered decision regions.

All functions render straight to a file with the Agg backend, so they are
safe to call from the CLI on headless machines.  The delimited outputs stay
the primary artifact; figures are companions for eyeballing results.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .builder import DecisionRegion
from .roc import RocCurve, SlopeProfile

__all__ = ["save_curves_figure", "save_regions_figure"]

RC_PARAMS = {
    "figure.figsize": (6.4, 5.6),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "font.size": 11,
}

_KIND_STYLE = {
    "svt": dict(color="#1f77b4", lw=1.6),
    "empirical": dict(color="#1f77b4", lw=1.2),
    "lrt_constructed": dict(color="#d62728", lw=1.6),
    "lrt_oracle": dict(color="#2ca02c", lw=1.4, ls="--"),
    "hull": dict(color="#7f7f7f", lw=1.2, ls=":"),
}


def save_curves_figure(
    curves: Sequence[RocCurve],
    labels: Sequence[str],
    path: str,
    title: Optional[str] = None,
) -> None:
    """Overlay ROC curves and write the figure to ``path``."""
    with plt.rc_context(RC_PARAMS):
        fig, ax = plt.subplots()
        ax.plot([0, 1], [0, 1], color="0.8", lw=0.8, zorder=0)
        for curve, label in zip(curves, labels):
            style = _KIND_STYLE.get(curve.kind, {})
            ax.plot(curve.pf, curve.pd, label=label, **style)
        ax.set_xlabel("probability of false alarm")
        ax.set_ylabel("probability of detection")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.02)
        if title:
            ax.set_title(title)
        ax.legend(loc="lower right")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def save_regions_figure(
    profile: SlopeProfile,
    eta: float,
    region: DecisionRegion,
    path: str,
    title: Optional[str] = None,
) -> None:
    """Plot curve slope against threshold with the recovered region shaded."""
    if profile.gamma_mid is None:
        raise ValueError("regions figure requires a gamma-tagged profile")
    g = np.asarray(profile.gamma_mid)
    slope = np.asarray(profile.slope)
    finite_hi = float(np.max(g))
    with plt.rc_context(RC_PARAMS):
        fig, ax = plt.subplots()
        order = np.argsort(g)
        ax.plot(g[order], slope[order], color="#1f77b4", lw=1.4, label="curve slope")
        ax.axhline(eta, color="#d62728", lw=1.0, ls="--", label=f"threshold = {eta:g}")
        for a, b in region.intervals:
            b_plot = finite_hi if math.isinf(b) else b
            ax.axvspan(a, b_plot, color="#d62728", alpha=0.15, lw=0)
        positive = slope[slope > 0]
        if len(positive) and positive.max() / max(positive.min(), 1e-300) > 1e3:
            ax.set_yscale("log")
        ax.set_xlabel("score threshold")
        ax.set_ylabel("curve slope (detection per false alarm)")
        if title:
            ax.set_title(title)
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
