"""Independent ground truth for the optimal ROC construction.

Computes likelihood-ratio decision regions directly from the densities by
sign-change bracketing and bisection, integrates the conditional CDFs over
those regions to obtain exact optimal operating points, builds the
randomization (least-concave-majorant) baseline, and compares curves for
pointwise dominance.  Nothing here touches the segment-summation path, so
agreement between the two is a genuine two-route check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .builder import DecisionRegion, _assemble_curve
from .models import ScoreModel, likelihood_ratio
from .roc import RocCurve

__all__ = [
    "DominanceReport",
    "FlatLevelSetError",
    "lrt_regions_analytic",
    "lrt_roc_direct",
    "grid_eta_values",
    "midcell_eta_values",
    "randomized_hull",
    "dominance_check",
]

_SCAN_CELLS = 10_000
# Extra subdivision of scan cells that contain a likelihood-ratio extremum,
# so near-tangent level crossings inside one cell are still bracketed.
_EXTREMUM_REFINE = 100
_FLAT_TOL = 1e-9


class FlatLevelSetError(ValueError):
    """The requested level set has positive measure (constant ratio)."""


@dataclass(frozen=True)
class DominanceReport:
    """Pointwise comparison of curve A against curve B at a common pf grid."""

    max_gap: float
    min_gap: float
    violations: tuple[float, ...]
    auc_a: float
    auc_b: float


@lru_cache(maxsize=32)
def _scan(model: ScoreModel) -> tuple[np.ndarray, np.ndarray]:
    """Likelihood ratio sampled on the support, refined around extrema."""
    s_lo, s_hi = model.support
    s = np.linspace(s_lo, s_hi, _SCAN_CELLS + 1)
    lam = likelihood_ratio(model, s)
    finite = np.isfinite(lam)
    dl = np.diff(np.where(finite, lam, np.nan))
    sign = np.sign(dl)
    interior_extrema = np.flatnonzero(sign[:-1] * sign[1:] < 0) + 1
    if len(interior_extrema):
        extras = [
            np.linspace(s[max(i - 1, 0)], s[min(i + 1, len(s) - 1)], 2 * _EXTREMUM_REFINE + 1)
            for i in interior_extrema
        ]
        s = np.unique(np.concatenate([s, *extras]))
        lam = likelihood_ratio(model, s)
    for arr in (s, lam):
        arr.setflags(write=False)
    return s, lam


@lru_cache(maxsize=32)
def _flat_levels(model: ScoreModel) -> tuple[tuple[float, float, float], ...]:
    """(lo, hi, lam value) of scan runs wider than support/1000 with flat LR."""
    from .models import _flat_intervals

    return tuple((f.lo, f.hi, f.value) for f in _flat_intervals(model))


def _check_flat(model: ScoreModel, eta: float) -> None:
    for lo, hi, value in _flat_levels(model):
        if abs(value - eta) <= _FLAT_TOL:
            raise FlatLevelSetError(
                f"level set has positive measure: ratio is {value:.12g} on [{lo:.6g}, {hi:.6g}]"
            )


def _g(model: ScoreModel, s: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Sign-stable level function f1(s) - eta*f0(s), same sign as LR - eta."""
    return np.asarray(model.f1.pdf(s), dtype=float) - eta * np.asarray(
        model.f0.pdf(s), dtype=float
    )


def _crossings(model: ScoreModel, etas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All level-crossing roots for all etas at once.

    Returns (eta_index, root) arrays.  Brackets come from the cached scan:
    a cell [s_i, s_i+1] brackets eta when min(lam) < eta <= max(lam) there;
    bisection then runs on every (cell, eta) pair simultaneously.
    """
    s, lam = _scan(model)
    lo = np.minimum(lam[:-1], lam[1:])
    hi = np.maximum(lam[:-1], lam[1:])
    start = np.searchsorted(etas, lo, side="right")
    end = np.searchsorted(etas, hi, side="right")
    start = np.minimum(start, end)
    counts = end - start
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=int), np.zeros(0)
    cells = np.repeat(np.arange(len(lo)), counts)
    eta_idx = np.concatenate(
        [np.arange(a, b) for a, b in zip(start, end) if b > a]
    )
    a = s[cells].astype(float)
    b = s[cells + 1].astype(float)
    ev = etas[eta_idx]
    ga = _g(model, a, ev)
    # ~60 halvings take the bracket to machine precision on any support
    for _ in range(60):
        mid = 0.5 * (a + b)
        gm = _g(model, mid, ev)
        same = (gm > 0) == (ga > 0)
        a = np.where(same, mid, a)
        ga = np.where(same, gm, ga)
        b = np.where(same, b, mid)
    return eta_idx, 0.5 * (a + b)


def _intervals_for_etas(model: ScoreModel, etas: np.ndarray) -> list[list[tuple[float, float]]]:
    """Decision intervals {s : LR(s) >= eta} per eta, clipped to the support.

    The topmost interval is open-ended (+inf) when it contains the upper
    support edge.
    """
    s, lam = _scan(model)
    for eta in etas:
        _check_flat(model, float(eta))
    eta_idx, roots = _crossings(model, etas)
    order = np.lexsort((roots, eta_idx))
    eta_idx = eta_idx[order]
    roots = roots[order]
    bounds = np.searchsorted(eta_idx, np.arange(len(etas) + 1))
    out = []
    for k in range(len(etas)):
        rr = roots[bounds[k] : bounds[k + 1]]
        inside = bool(lam[0] >= etas[k])
        ivs: list[tuple[float, float]] = []
        cur = s[0] if inside else None
        for r in rr:
            if inside:
                if r > cur:
                    ivs.append((cur, float(r)))
                inside = False
            else:
                cur = float(r)
                inside = True
        if inside:
            ivs.append((cur, math.inf))
        # merge intervals touching at a shared root (duplicate bracketing)
        merged: list[tuple[float, float]] = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        out.append(merged)
    return out


def lrt_regions_analytic(model: ScoreModel, eta: float) -> DecisionRegion:
    """Maximal score intervals where the likelihood ratio is >= ``eta``.

    Found by sign-change bracketing on a dense scan of the support followed
    by bisection.  Raises :class:`FlatLevelSetError` when the ratio is
    constant at ``eta`` over a non-negligible interval.
    """
    if eta < 0:
        raise ValueError("eta must be >= 0")
    ivs = _intervals_for_etas(model, np.array([float(eta)]))[0]
    return DecisionRegion(tuple(ivs))


def _integrate_regions(model: ScoreModel, ivs: list[tuple[float, float]]) -> tuple[float, float]:
    """(pf, pd) of a region via CDF differences, on the whole real line.

    An interval starting at the lower support edge is treated as extending
    to -inf: the region truly continues below the support whenever the
    ratio still clears the threshold there, and the excluded mass is below
    tail_mass anyway.
    """
    s_lo = model.support[0]
    pf = 0.0
    pd = 0.0
    for a, b in ivs:
        f0_a, f1_a = (0.0, 0.0) if a <= s_lo else (
            float(model.f0.cdf(a)),
            float(model.f1.cdf(a)),
        )
        f0_b, f1_b = (1.0, 1.0) if math.isinf(b) else (
            float(model.f0.cdf(b)),
            float(model.f1.cdf(b)),
        )
        pf += f0_b - f0_a
        pd += f1_b - f1_a
    return pf, pd


def lrt_roc_direct(model: ScoreModel, etas) -> RocCurve:
    """Optimal ROC computed directly from the densities at given thresholds.

    For each eta the decision region is found by root bracketing and its
    pf/pd evaluated as CDF differences; points are deduplicated, sorted and
    completed with exact (0,0)/(1,1) endpoints.
    """
    etas = np.sort(np.unique(np.asarray(etas, dtype=float)))
    if len(etas) == 0:
        raise ValueError("etas must be nonempty")
    if np.any(etas < 0):
        raise ValueError("etas must be >= 0")
    pts = np.array(
        [_integrate_regions(model, ivs) for ivs in _intervals_for_etas(model, etas)]
    )
    return _assemble_curve(pts, kind="lrt_oracle")


def grid_eta_values(model: ScoreModel, curve: RocCurve) -> np.ndarray:
    """Likelihood-ratio levels attained at a tagged curve's thresholds.

    Sampling the direct curve at these levels places its points at the
    operating points realizable on the curve's own threshold grid, which
    makes interpolated comparisons measure construction error rather than
    abscissa mismatch.
    """
    if curve.gamma is None:
        raise ValueError("grid eta values require a gamma-tagged curve")
    lam = likelihood_ratio(model, np.asarray(curve.gamma))
    lam = lam[np.isfinite(lam)]
    return np.unique(lam)


def midcell_eta_values(model: ScoreModel, curve: RocCurve) -> np.ndarray:
    """Likelihood-ratio levels at threshold-cell midpoints of a tagged curve.

    Deliberately misaligned with the curve's own operating points; useful
    for measuring how the interpolated gap shrinks under grid refinement.
    """
    if curve.gamma is None:
        raise ValueError("mid-cell eta values require a gamma-tagged curve")
    mids = 0.5 * (np.asarray(curve.gamma[:-1]) + np.asarray(curve.gamma[1:]))
    lam = likelihood_ratio(model, mids)
    lam = lam[np.isfinite(lam)]
    return np.unique(lam)


def randomized_hull(curve: RocCurve) -> RocCurve:
    """Least concave majorant of the curve's points plus exact endpoints.

    Randomizing between two decision rules attains any point on the chord
    between their operating points; the upper convex hull is the exhaustive
    application of that construction.  Hull vertices are a subset of the
    input points augmented with (0,0) and (1,1).
    """
    pts = sorted(set(zip(np.concatenate([curve.pf, [0.0, 1.0]]),
                         np.concatenate([curve.pd, [0.0, 1.0]]))))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    pf = np.array([p[0] for p in hull])
    pd = np.array([p[1] for p in hull])
    return RocCurve(pf, pd, None, kind="hull")


def dominance_check(a: RocCurve, b: RocCurve, tol: float = 1e-9) -> DominanceReport:
    """Compare pd of curve ``a`` against curve ``b`` at their union pf grid.

    ``max_gap``/``min_gap`` are extremes of pd_a - pd_b under linear
    interpolation; ``violations`` lists the pf locations where curve ``a``
    falls more than ``tol`` below curve ``b``.
    """
    grid = np.union1d(a.pf, b.pf)
    gap = a.interp_pd(grid) - b.interp_pd(grid)
    violations = tuple(float(x) for x in grid[gap < -tol])
    return DominanceReport(
        max_gap=float(np.max(gap)),
        min_gap=float(np.min(gap)),
        violations=violations,
        auc_a=a.auc(),
        auc_b=b.auc(),
    )


def dominance_json_obj(report: DominanceReport) -> dict:
    return {
        "max_gap": report.max_gap,
        "min_gap": report.min_gap,
        "violations": list(report.violations),
        "auc_a": report.auc_a,
        "auc_b": report.auc_b,
    }
