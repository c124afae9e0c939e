"""Optimal (LRT) ROC construction from a sampled SVT ROC curve.

For a given likelihood-ratio threshold eta, the decision region of the
optimal test corresponds to the parts of the SVT curve whose slope is at
least eta.  Summing the pf/pd extents of those curve segments yields one
point of the optimal curve; sweeping eta over every distinct slope level
traces the whole curve.  When the curve points carry their SVT thresholds,
the same segments read off the decision region in score space directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .roc import RocCurve, SlopeProfile, slope_profile

__all__ = [
    "Segment",
    "EtaPoint",
    "DecisionRegion",
    "segments_at",
    "lrt_point",
    "eta_sweep_values",
    "build_optimal_roc",
    "recover_regions",
    "coarsen_empirical",
    "write_regions_json",
    "regions_json_obj",
    "parse_regions_json",
]

# Points closer than this in both coordinates are merged when assembling a
# swept curve; sweep plateaus produce exact duplicates.
MERGE_TOL = 1e-12

# Relative tolerance for collapsing numerically identical slope levels in
# the eta sweep (e.g. mirror-symmetric cells that differ by rounding only).
_ETA_REL_TOL = 1e-9


@dataclass(frozen=True)
class Segment:
    """A run of the SVT curve whose slope clears the threshold."""

    pf_start: float
    pf_end: float
    pd_start: float
    pd_end: float
    gamma_start: Optional[float] = None
    gamma_end: Optional[float] = None

    def __post_init__(self):
        if not (self.pf_start < self.pf_end):
            raise ValueError("segment needs pf_start < pf_end")
        if self.pd_start > self.pd_end + 1e-12:
            raise ValueError("segment needs pd_start <= pd_end")
        if (
            self.gamma_start is not None
            and self.gamma_end is not None
            and not (self.gamma_start > self.gamma_end)
        ):
            raise ValueError("segment gamma_start must exceed gamma_end")

    @property
    def dpf(self) -> float:
        return self.pf_end - self.pf_start

    @property
    def dpd(self) -> float:
        return self.pd_end - self.pd_start


@dataclass(frozen=True)
class EtaPoint:
    """Operating point of the optimal test at one threshold value."""

    eta: float
    pf: float
    pd: float
    segments: tuple[Segment, ...]


@dataclass(frozen=True)
class DecisionRegion:
    """Union of disjoint score intervals on which H1 is declared."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if not (b > a):
                raise ValueError(f"empty interval [{a}, {b}]")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if a1 <= b0:
                raise ValueError("intervals must be disjoint and ascending")


def _check_consistent(profile: SlopeProfile, curve: RocCurve) -> None:
    left = np.asarray(profile.left)
    if len(left) == 0 or left.max() + 1 >= curve.n or left.min() < 0:
        raise ValueError("inconsistent inputs")
    mids = 0.5 * (curve.pf[left] + curve.pf[left + 1])
    if not np.allclose(mids, profile.pf_mid, rtol=0.0, atol=1e-12):
        raise ValueError("inconsistent inputs")


def _runs(profile: SlopeProfile, eta: float) -> list[tuple[int, int]]:
    """Maximal runs [i, j] of consecutive profile entries with slope >= eta."""
    mask = profile.slope >= eta
    if not mask.any():
        return []
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def segments_at(profile: SlopeProfile, curve: RocCurve, eta: float) -> list[Segment]:
    """Curve segments whose secant slope is >= ``eta``.

    Each maximal run of qualifying profile entries maps to one segment
    spanning the run's outermost curve points.  Returns an empty list when
    no entry qualifies.
    """
    _check_consistent(profile, curve)
    if eta < 0:
        raise ValueError("eta must be >= 0")
    out = []
    for i, j in _runs(profile, eta):
        li = int(profile.left[i])
        ri = int(profile.left[j]) + 1
        gs = ge = None
        if curve.gamma is not None:
            gs, ge = float(curve.gamma[li]), float(curve.gamma[ri])
        out.append(
            Segment(
                pf_start=float(curve.pf[li]),
                pf_end=float(curve.pf[ri]),
                pd_start=float(curve.pd[li]),
                pd_end=float(curve.pd[ri]),
                gamma_start=gs,
                gamma_end=ge,
            )
        )
    return out


def lrt_point(segments: Sequence[Segment], eta: float) -> EtaPoint:
    """Sum segment extents into one operating point of the optimal curve."""
    segs = tuple(sorted(segments, key=lambda s: s.pf_start))
    for a, b in zip(segs, segs[1:]):
        if b.pf_start < a.pf_end:
            raise ValueError("overlapping segments")
    pf = math.fsum(s.dpf for s in segs)
    pd = math.fsum(s.dpd for s in segs)
    return EtaPoint(eta=eta, pf=pf, pd=pd, segments=segs)


def _dedupe_close(values: np.ndarray, rel_tol: float) -> np.ndarray:
    """Ascending unique values, collapsing neighbours within rel_tol."""
    vals = np.unique(values)
    if len(vals) < 2:
        return vals
    keep = np.concatenate([[True], np.diff(vals) > rel_tol * np.maximum(np.abs(vals[1:]), 1e-300)])
    return vals[keep]


def eta_sweep_values(profile: SlopeProfile) -> np.ndarray:
    """Threshold sweep: distinct slopes, midpoints between them, and zero.

    Every topology change of the super-level set {slope >= eta} happens at
    an observed slope value; midpoints capture the open intervals between
    them.  Returned in descending order.
    """
    slopes = _dedupe_close(profile.slope, _ETA_REL_TOL)
    mids = 0.5 * (slopes[:-1] + slopes[1:])
    etas = np.unique(np.concatenate([slopes, mids, [0.0]]))
    return etas[::-1]


def _assemble_curve(
    points: np.ndarray, kind: str, top_absorb: tuple[float, float] = (1e-15, 1e-15)
) -> RocCurve:
    """Sort, merge near-duplicates, enforce (0,0)/(1,1), build the curve.

    ``top_absorb`` gives per-coordinate distances within which the topmost
    point is absorbed into the exact (1,1) corner instead of bridged to it;
    the sweep's full-span point sits below (1,1) by exactly the curve's
    support-truncation loss, and bridging that gap would fabricate a steep
    terminal segment.
    """
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    merged = [pts[0]]
    for p in pts[1:]:
        last = merged[-1]
        if abs(p[0] - last[0]) <= MERGE_TOL and abs(p[1] - last[1]) <= MERGE_TOL:
            continue
        if p[0] - last[0] <= 1e-15:
            # same pf operating point: keep the higher pd
            merged[-1] = (last[0], max(last[1], p[1]))
            continue
        merged.append((p[0], p[1]))
    pf = np.array([p[0] for p in merged])
    pd = np.array([p[1] for p in merged])
    if pf[0] > 0.0 or pd[0] > 0.0:
        if pf[0] <= 1e-15:
            pf[0], pd[0] = 0.0, 0.0
        else:
            pf = np.concatenate([[0.0], pf])
            pd = np.concatenate([[0.0], pd])
    if pf[-1] < 1.0 or pd[-1] < 1.0:
        if 1.0 - pf[-1] <= top_absorb[0] and 1.0 - pd[-1] <= top_absorb[1]:
            pf[-1], pd[-1] = 1.0, 1.0
        else:
            pf = np.concatenate([pf, [1.0]])
            pd = np.concatenate([pd, [1.0]])
    return RocCurve(pf, pd, None, kind=kind)


def coarsen_empirical(curve: RocCurve) -> RocCurve:
    """Quantize an empirical curve onto pf bins of width 1/sqrt(min count).

    Raw empirical step curves have secant slopes of only 0 or infinity, so
    slope super-level sets are meaningless; binning restores usable slopes
    at the scale of the sampling noise.
    """
    if curve.kind != "empirical":
        return curve
    if curve.sample_sizes:
        n_min = min(curve.sample_sizes)
    else:
        dpf = np.diff(np.unique(curve.pf))
        n_min = int(round(1.0 / dpf.min())) if len(dpf) else 1
    width = 1.0 / np.sqrt(n_min)
    bins = np.floor(curve.pf / width).astype(int)
    last_of_bin = np.concatenate([np.diff(bins) != 0, [True]])
    pf = curve.pf[last_of_bin]
    pd = curve.pd[last_of_bin]
    if pf[0] > 0.0 or pd[0] > 0.0:
        pf = np.concatenate([[0.0], pf])
        pd = np.concatenate([[0.0], pd])
    distinct = np.concatenate([[True], (np.diff(pf) != 0) | (np.diff(pd) != 0)])
    return RocCurve(
        pf[distinct], pd[distinct], None, kind="empirical", sample_sizes=curve.sample_sizes
    )


def build_optimal_roc(curve: RocCurve, profile: Optional[SlopeProfile] = None) -> RocCurve:
    """Construct the optimal ROC curve from a sampled SVT (or empirical) curve.

    Sweeps the threshold over :func:`eta_sweep_values`, forms the qualifying
    segments at each level, sums their extents into operating points, and
    assembles the deduplicated, endpoint-complete result.  Empirical curves
    are coarsened first (see :func:`coarsen_empirical`); pass ``profile``
    explicitly to override the slope source.
    """
    if curve.n < 3:
        raise ValueError("curve must have at least 3 points")
    working = coarsen_empirical(curve) if profile is None else curve
    if profile is None:
        profile = slope_profile(working)
    _check_consistent(profile, working)
    pts = []
    for eta in eta_sweep_values(profile):
        point = lrt_point(segments_at(profile, working, float(eta)), float(eta))
        pts.append((point.pf, point.pd))
    # the full-span sweep point falls short of (1,1) by the input curve's
    # own endpoint truncation; absorb it rather than bridge the gap
    top_absorb = (
        (1.0 - float(working.pf[-1])) + float(working.pf[0]) + 1e-15,
        (1.0 - float(working.pd[-1])) + float(working.pd[0]) + 1e-15,
    )
    return _assemble_curve(np.array(pts), kind="lrt_constructed", top_absorb=top_absorb)


def recover_regions(curve: RocCurve, profile: SlopeProfile, eta: float) -> DecisionRegion:
    """Read the decision region off the slope-vs-threshold relationship.

    Requires gamma tags on the curve (model-known mode).  Each qualifying
    segment contributes the score interval [gamma_end, gamma_start]; the
    segment containing the curve's first point extends to +inf, since every
    score above the top threshold is accepted.
    """
    if curve.gamma is None:
        raise ValueError("thresholds unknown; region recovery requires model-known mode")
    segments = segments_at(profile, curve, eta)
    intervals = []
    for k, seg in enumerate(segments):
        hi = seg.gamma_start
        if k == 0 and seg.pf_start == float(curve.pf[0]):
            hi = math.inf
        intervals.append((seg.gamma_end, hi))
    intervals.sort()
    return DecisionRegion(tuple(intervals))


# ---------------------------------------------------------------------------
# Region JSON format
# ---------------------------------------------------------------------------


def regions_json_obj(region: DecisionRegion, eta: float) -> dict:
    return {
        "eta": eta,
        "intervals": [[a, "inf" if math.isinf(b) else b] for a, b in region.intervals],
    }


def write_regions_json(region: DecisionRegion, eta: float, fh) -> None:
    json.dump(regions_json_obj(region, eta), fh, indent=2)
    fh.write("\n")


def parse_regions_json(obj) -> tuple[float, DecisionRegion]:
    eta = float(obj["eta"])
    ivs = tuple(
        (float(a), math.inf if b == "inf" else float(b)) for a, b in obj["intervals"]
    )
    return eta, DecisionRegion(ivs)
