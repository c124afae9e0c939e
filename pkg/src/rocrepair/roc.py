"""ROC curves from score-variable threshold (SVT) tests.

Generates the SVT ROC of a score model on an equal-false-alarm-increment
threshold grid, computes secant slope profiles, tests concavity, and builds
empirical ROC curves from labeled score samples.  Also owns the curve/sample
CSV formats shared by the rest of the package.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .models import ScoreModel, validate

__all__ = [
    "CURVE_KINDS",
    "RocPoint",
    "RocCurve",
    "SlopeProfile",
    "ConcavityReport",
    "DegenerateModelError",
    "svt_roc",
    "slope_profile",
    "is_concave",
    "empirical_svt_roc",
    "default_concavity_tol",
    "write_curve_csv",
    "read_curve_csv",
    "read_samples_csv",
    "write_samples_csv",
]

CURVE_KINDS = ("svt", "lrt_constructed", "lrt_oracle", "hull", "empirical")

# Curves built by thresholding step functions (empirical data, hulls of such
# curves) legitimately contain vertical segments; analytic generators must
# produce strictly increasing false-alarm coordinates.
_STEP_KINDS = ("empirical", "hull")


class DegenerateModelError(ValueError):
    """Raised when f0 vanishes somewhere inside the support."""


@dataclass(frozen=True)
class RocPoint:
    """One operating point, optionally tagged with its SVT threshold."""

    pf: float
    pd: float
    gamma: Optional[float] = None


@dataclass(frozen=True)
class RocCurve:
    """Ordered polyline of (pf, pd) operating points.

    Stored as read-only float arrays.  ``gamma`` carries the SVT threshold
    per point when known (model-known mode), else None.  ``sample_sizes``
    records (n_h0, n_h1) for empirical curves.
    """

    pf: np.ndarray
    pd: np.ndarray
    gamma: Optional[np.ndarray]
    kind: str
    sample_sizes: Optional[tuple[int, int]] = None

    def __post_init__(self):
        pf = np.ascontiguousarray(self.pf, dtype=float)
        pd = np.ascontiguousarray(self.pd, dtype=float)
        gamma = self.gamma
        if gamma is not None:
            gamma = np.ascontiguousarray(gamma, dtype=float)
        if self.kind not in CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if pf.ndim != 1 or pf.shape != pd.shape:
            raise ValueError("pf and pd must be 1-d arrays of equal length")
        if gamma is not None and gamma.shape != pf.shape:
            raise ValueError("gamma must match pf/pd length")
        if len(pf) < 2:
            raise ValueError("a curve needs at least two points")
        if np.any(pf < 0) or np.any(pf > 1) or np.any(pd < 0) or np.any(pd > 1):
            raise ValueError("pf and pd must lie in [0, 1]")
        dpf = np.diff(pf)
        if self.kind in _STEP_KINDS:
            if np.any(dpf < 0):
                raise ValueError("pf must be nondecreasing")
            if np.any((dpf == 0) & (np.diff(pd) == 0)):
                raise ValueError("consecutive points must be distinct")
        elif np.any(dpf <= 0):
            raise ValueError("pf must be strictly increasing")
        if np.any(np.diff(pd) < -1e-12):
            raise ValueError("pd must be nondecreasing")
        if gamma is not None and np.any(np.diff(gamma) >= 0):
            raise ValueError("gamma tags must be strictly decreasing")
        for arr in (pf, pd, gamma):
            if arr is not None:
                arr.setflags(write=False)
        object.__setattr__(self, "pf", pf)
        object.__setattr__(self, "pd", pd)
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self) -> int:
        return len(self.pf)

    @property
    def points(self) -> list[RocPoint]:
        if self.gamma is None:
            return [RocPoint(f, d) for f, d in zip(self.pf, self.pd)]
        return [RocPoint(f, d, g) for f, d, g in zip(self.pf, self.pd, self.gamma)]

    def auc(self) -> float:
        """Trapezoid area under the polyline."""
        return float(np.trapezoid(self.pd, self.pf))

    def interp_pd(self, pf_query) -> np.ndarray:
        """Linear interpolation of pd at given pf values.

        Vertical segments (duplicate pf) evaluate to their upper endpoint.
        Queries outside the pf range clamp to the end values.
        """
        pf, pd = self.pf, self.pd
        if len(pf) > 1 and np.any(np.diff(pf) == 0):
            keep = np.concatenate([np.diff(pf) > 0, [True]])
            pf, pd = pf[keep], pd[keep]
        return np.interp(np.asarray(pf_query, dtype=float), pf, pd)


@dataclass(frozen=True)
class SlopeProfile:
    """Secant slopes of adjacent curve points, indexed by pf midpoint.

    ``left`` holds the source-curve index of each entry's left point so that
    segment extraction can map entries back to curve coordinates.  Adjacent
    point pairs closer than 1e-15 in pf are skipped.
    """

    pf_mid: np.ndarray
    slope: np.ndarray
    gamma_mid: Optional[np.ndarray]
    left: np.ndarray

    def __post_init__(self):
        for arr in (self.pf_mid, self.slope, self.gamma_mid, self.left):
            if arr is not None:
                np.asarray(arr).setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.slope)


@dataclass(frozen=True)
class ConcavityReport:
    """Outcome of the slope-monotonicity test."""

    concave: bool
    first_violation: Optional[float]
    max_violation: float
    tol: float


def svt_roc(model: ScoreModel, n_points: int) -> RocCurve:
    """SVT ROC curve of ``model`` on an equal-pf-increment threshold grid.

    Thresholds are placed at gamma = F0^{-1}(1 - k/(n-1)), clipped to the
    model support, so the false-alarm coordinate is uniformly spaced except
    at the clipped ends.  Points carry their gamma tags.

    Raises
    ------
    DegenerateModelError
        If f0 vanishes somewhere strictly inside the support (the threshold
        grid would degenerate).
    ValueError
        If fewer than 3 points are requested.
    """
    if n_points < 3:
        raise ValueError("n_points must be >= 3")
    report = validate(model)
    if not report.f0_positive_ok:
        raise DegenerateModelError("degenerate null density")
    s_lo, s_hi = model.support
    targets = np.linspace(0.0, 1.0, n_points)
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = np.clip(model.f0.ppf(1.0 - targets), s_lo, s_hi)
    pf = 1.0 - np.asarray(model.f0.cdf(gamma), dtype=float)
    pd = 1.0 - np.asarray(model.f1.cdf(gamma), dtype=float)
    keep = np.concatenate([[True], (np.diff(pf) > 0) & (np.diff(gamma) < 0)])
    return RocCurve(pf[keep], pd[keep], gamma[keep], kind="svt")


def slope_profile(curve: RocCurve) -> SlopeProfile:
    """Forward-difference slopes between adjacent points of ``curve``."""
    if curve.n < 2:
        raise ValueError("curve too short")
    dpf = np.diff(curve.pf)
    keep = dpf >= 1e-15
    left = np.flatnonzero(keep)
    slope = np.diff(curve.pd)[keep] / dpf[keep]
    pf_mid = 0.5 * (curve.pf[left] + curve.pf[left + 1])
    gamma_mid = None
    if curve.gamma is not None:
        gamma_mid = 0.5 * (curve.gamma[left] + curve.gamma[left + 1])
    return SlopeProfile(pf_mid=pf_mid, slope=slope, gamma_mid=gamma_mid, left=left)


def is_concave(curve: RocCurve, tol: float = 1e-9) -> ConcavityReport:
    """Test whether successive secant slopes are nonincreasing within ``tol``.

    ``first_violation`` is the pf of the shared curve point where the slope
    first increases by more than ``tol``; ``max_violation`` the largest
    slope increase found (0 when slopes never increase).
    """
    prof = slope_profile(curve)
    if prof.n < 2:
        return ConcavityReport(True, None, 0.0, tol)
    rises = np.diff(prof.slope)
    max_violation = float(max(np.max(rises), 0.0))
    bad = np.flatnonzero(rises > tol)
    if len(bad) == 0:
        return ConcavityReport(True, None, max_violation, tol)
    first_pf = float(curve.pf[prof.left[bad[0] + 1]])
    return ConcavityReport(False, first_pf, max_violation, tol)


def empirical_svt_roc(scores_h0: Sequence[float], scores_h1: Sequence[float]) -> RocCurve:
    """Empirical ROC from labeled samples, one threshold per distinct score.

    pf is the fraction of H0 scores >= gamma and pd the fraction of H1
    scores >= gamma, swept over all distinct observed scores; endpoints
    (0,0) and (1,1) are appended.
    """
    h0 = np.sort(np.asarray(scores_h0, dtype=float))
    h1 = np.sort(np.asarray(scores_h1, dtype=float))
    if len(h0) == 0 or len(h1) == 0:
        raise ValueError("no samples")
    thresholds = np.unique(np.concatenate([h0, h1]))[::-1]
    pf = 1.0 - np.searchsorted(h0, thresholds, side="left") / len(h0)
    pd = 1.0 - np.searchsorted(h1, thresholds, side="left") / len(h1)
    pf = np.concatenate([[0.0], pf])
    pd = np.concatenate([[0.0], pd])
    if pf[-1] != 1.0 or pd[-1] != 1.0:
        pf = np.concatenate([pf, [1.0]])
        pd = np.concatenate([pd, [1.0]])
    distinct = np.concatenate([[True], (np.diff(pf) != 0) | (np.diff(pd) != 0)])
    return RocCurve(
        pf[distinct],
        pd[distinct],
        None,
        kind="empirical",
        sample_sizes=(len(h0), len(h1)),
    )


def default_concavity_tol(curve: RocCurve) -> float:
    """1e-9 for analytic curves, 2/sqrt(min class count) for empirical ones."""
    if curve.kind == "empirical" and curve.sample_sizes:
        return 2.0 / np.sqrt(min(curve.sample_sizes))
    return 1e-9


# ---------------------------------------------------------------------------
# CSV formats
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_curve_csv(curve: RocCurve, fh) -> None:
    """Write ``pf,pd,gamma`` rows at full double precision."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["pf", "pd", "gamma"])
    if curve.gamma is None:
        for f, d in zip(curve.pf, curve.pd):
            writer.writerow([_fmt(f), _fmt(d), ""])
    else:
        for f, d, g in zip(curve.pf, curve.pd, curve.gamma):
            writer.writerow([_fmt(f), _fmt(d), _fmt(g)])


def curve_csv_bytes(curve: RocCurve) -> bytes:
    buf = io.StringIO()
    write_curve_csv(curve, buf)
    return buf.getvalue().encode()


def read_curve_csv(fh, kind: str = "svt") -> RocCurve:
    """Parse a curve CSV written by :func:`write_curve_csv`."""
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != ["pf", "pd", "gamma"]:
        raise ValueError(f"bad curve CSV header: {header}")
    pf, pd, gamma = [], [], []
    for row in reader:
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"bad curve CSV row: {row}")
        pf.append(float(row[0]))
        pd.append(float(row[1]))
        gamma.append(float(row[2]) if row[2] != "" else None)
    has_gamma = [g is not None for g in gamma]
    if any(has_gamma) and not all(has_gamma):
        raise ValueError("curve CSV mixes tagged and untagged rows")
    garr = np.array(gamma, dtype=float) if all(has_gamma) and gamma else None
    return RocCurve(np.array(pf), np.array(pd), garr, kind=kind)


def read_samples_csv(fh) -> tuple[np.ndarray, np.ndarray]:
    """Parse a ``score,label`` CSV into (h0_scores, h1_scores)."""
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != ["score", "label"]:
        raise ValueError(f"bad samples CSV header: {header}")
    h0, h1 = [], []
    for row in reader:
        if not row:
            continue
        if len(row) != 2 or row[1] not in ("0", "1"):
            raise ValueError(f"bad samples CSV row: {row}")
        (h1 if row[1] == "1" else h0).append(float(row[0]))
    return np.array(h0, dtype=float), np.array(h1, dtype=float)


def write_samples_csv(scores_h0, scores_h1, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["score", "label"])
    for s in scores_h0:
        writer.writerow([_fmt(s), "0"])
    for s in scores_h1:
        writer.writerow([_fmt(s), "1"])
