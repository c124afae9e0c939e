"""Score models: pairs of conditional score densities for binary hypothesis tests.

A :class:`ScoreModel` bundles the two conditional distributions of a scalar
score variable (``f0`` under the null hypothesis, ``f1`` under the positive
hypothesis) together with a finite working support that captures all but
``tail_mass`` probability per tail of each distribution.  Four analytic
families with closed-form densities, CDFs and quantiles are supported:
Gaussian, Gaussian mixture, uniform and piecewise-linear.

All evaluation functions are pure and accept scalars or numpy arrays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Union

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri

__all__ = [
    "Hypothesis",
    "Gaussian",
    "GaussianMixture",
    "Uniform",
    "PiecewiseLinear",
    "Distribution",
    "ScoreModel",
    "ModelSpecError",
    "ValidationReport",
    "FlatInterval",
    "density",
    "cdf",
    "likelihood_ratio",
    "validate",
    "central_mass_interval",
    "parse_model",
    "load_model",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Flatness scan parameters: an interval wider than support/1000 on which the
# likelihood ratio varies by less than FLATNESS_TOL violates the assumption
# that likelihood-ratio level sets have zero measure.
FLATNESS_TOL = 1e-9
FLAT_WIDTH_FRACTION = 1e-3
_SCAN_POINTS = 10_001


class Hypothesis(Enum):
    """The two hypotheses of the binary test."""

    H0 = 0
    H1 = 1


class ModelSpecError(ValueError):
    """Raised for malformed or unparseable model specifications."""


@dataclass(frozen=True)
class Gaussian:
    """Normal distribution N(mu, sigma^2)."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0):
            raise ModelSpecError(f"gaussian sigma must be > 0, got {self.sigma}")

    def pdf(self, s):
        z = (np.asarray(s, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * _SQRT_2PI)

    def cdf(self, s):
        return ndtr((np.asarray(s, dtype=float) - self.mu) / self.sigma)

    def ppf(self, q):
        with np.errstate(divide="ignore"):
            return self.mu + self.sigma * ndtri(np.asarray(q, dtype=float))

    def breakpoints(self):
        return ()


@dataclass(frozen=True)
class GaussianMixture:
    """Finite mixture of Gaussians, components given as (weight, mu, sigma)."""

    components: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        comps = tuple((float(w), float(mu), float(sg)) for w, mu, sg in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ModelSpecError("gaussian_mixture needs at least one component")
        if any(w <= 0 for w, _, _ in comps):
            raise ModelSpecError("mixture weights must be > 0")
        if any(sg <= 0 for _, _, sg in comps):
            raise ModelSpecError("mixture sigmas must be > 0")

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s, dtype=float)
        for w, mu, sg in self.components:
            z = (s - mu) / sg
            out = out + w * np.exp(-0.5 * z * z) / (sg * _SQRT_2PI)
        return out

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s, dtype=float)
        for w, mu, sg in self.components:
            out = out + w * ndtr((s - mu) / sg)
        return out

    def ppf(self, q):
        """Quantile of the normalized mixture (robust to non-unit weights)."""
        q = np.asarray(q, dtype=float)
        total = sum(w for w, _, _ in self.components)
        # The normalized-mixture quantile is bracketed by the extreme
        # component quantiles at the same level.
        with np.errstate(divide="ignore"):
            zq = ndtri(np.clip(q, 0.0, 1.0))
        lo = np.full_like(q, np.inf)
        hi = np.full_like(q, -np.inf)
        for _, mu, sg in self.components:
            lo = np.minimum(lo, mu + sg * zq)
            hi = np.maximum(hi, mu + sg * zq)
        out = np.where(np.isfinite(lo) & np.isfinite(hi), 0.5 * (lo + hi), lo)
        finite = np.isfinite(lo) & np.isfinite(hi)
        a = np.where(finite, lo, 0.0)
        b = np.where(finite, hi, 0.0)
        target = q * total
        for _ in range(200):
            mid = 0.5 * (a + b)
            below = self.cdf(mid) < target
            a = np.where(below, mid, a)
            b = np.where(below, b, mid)
        out = np.where(finite, 0.5 * (a + b), out)
        return out

    def breakpoints(self):
        return tuple(mu for _, mu, _ in self.components)


@dataclass(frozen=True)
class Uniform:
    """Uniform distribution on [a, b]."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.b > self.a):
            raise ModelSpecError(f"uniform needs b > a, got [{self.a}, {self.b}]")

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= self.a) & (s <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)

    def cdf(self, s):
        s = np.asarray(s, dtype=float)
        return np.clip((s - self.a) / (self.b - self.a), 0.0, 1.0)

    def ppf(self, q):
        q = np.asarray(q, dtype=float)
        return self.a + np.clip(q, 0.0, 1.0) * (self.b - self.a)

    def breakpoints(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Density that interpolates linearly between (x, y) knots, zero outside.

    Knot heights are taken as given; whether they integrate to one is checked
    by :func:`validate`, not enforced here.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(x), float(y)) for x, y in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ModelSpecError("piecewise_linear needs at least two knots")
        xs = [x for x, _ in knots]
        if any(x1 <= x0 for x0, x1 in zip(xs, xs[1:])):
            raise ModelSpecError("piecewise_linear knot x values must be strictly increasing")
        if any(y < 0 for _, y in knots):
            raise ModelSpecError("piecewise_linear knot heights must be >= 0")

    @cached_property
    def _arrays(self):
        xs = np.array([x for x, _ in self.knots])
        ys = np.array([y for _, y in self.knots])
        # cumulative integral at knots (trapezoid is exact for a PL density)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs))])
        return xs, ys, cum

    def pdf(self, s):
        xs, ys, _ = self._arrays
        s = np.asarray(s, dtype=float)
        return np.interp(s, xs, ys, left=0.0, right=0.0)

    def cdf(self, s):
        xs, ys, cum = self._arrays
        s = np.asarray(s, dtype=float)
        idx = np.clip(np.searchsorted(xs, s, side="right") - 1, 0, len(xs) - 2)
        x0 = xs[idx]
        y0 = ys[idx]
        slope = (ys[idx + 1] - y0) / (xs[idx + 1] - x0)
        t = np.clip(s - x0, 0.0, xs[idx + 1] - x0)
        val = cum[idx] + y0 * t + 0.5 * slope * t * t
        return np.where(s <= xs[0], 0.0, np.where(s >= xs[-1], cum[-1], val))

    def ppf(self, q):
        xs, ys, cum = self._arrays
        q = np.clip(np.asarray(q, dtype=float), 0.0, cum[-1])
        idx = np.clip(np.searchsorted(cum, q, side="right") - 1, 0, len(xs) - 2)
        x0 = xs[idx]
        y0 = ys[idx]
        dx = xs[idx + 1] - x0
        slope = (ys[idx + 1] - y0) / dx
        rem = q - cum[idx]
        # solve 0.5*slope*t^2 + y0*t = rem on [0, dx]
        with np.errstate(invalid="ignore", divide="ignore"):
            disc = np.sqrt(np.maximum(y0 * y0 + 2.0 * slope * rem, 0.0))
            t_quad = (disc - y0) / np.where(slope == 0, 1.0, slope)
            t_lin = np.where(y0 > 0, rem / np.where(y0 == 0, 1.0, y0), 0.0)
        t = np.where(np.abs(slope) > 1e-300, t_quad, t_lin)
        return x0 + np.clip(t, 0.0, dx)

    def breakpoints(self):
        return tuple(x for x, _ in self.knots)


Distribution = Union[Gaussian, GaussianMixture, Uniform, PiecewiseLinear]


@dataclass(frozen=True)
class ScoreModel:
    """A binary hypothesis-testing problem instance.

    Attributes
    ----------
    f0, f1 : Distribution
        Conditional score distributions under H0 and H1.
    tail_mass : float
        Probability mass per tail of each distribution excluded from the
        working support.
    support : tuple of float
        Closed interval [s_lo, s_hi] covering all but ``tail_mass`` per tail
        of both distributions; computed at construction.
    """

    f0: Distribution
    f1: Distribution
    tail_mass: float = 1e-9
    support: tuple[float, float] = field(init=False)

    def __post_init__(self):
        if not (0 < self.tail_mass < 0.5):
            raise ModelSpecError(f"tail_mass must be in (0, 0.5), got {self.tail_mass}")
        t = self.tail_mass
        s_lo = min(float(self.f0.ppf(t)), float(self.f1.ppf(t)))
        s_hi = max(float(self.f0.ppf(1.0 - t)), float(self.f1.ppf(1.0 - t)))
        if not (np.isfinite(s_lo) and np.isfinite(s_hi) and s_hi > s_lo):
            raise ModelSpecError("could not determine a finite support interval")
        object.__setattr__(self, "support", (s_lo, s_hi))

    @property
    def support_width(self) -> float:
        return self.support[1] - self.support[0]

    def dist(self, hyp: Hypothesis) -> Distribution:
        return self.f0 if hyp is Hypothesis.H0 else self.f1


def density(model: ScoreModel, hyp: Hypothesis, s):
    """Conditional density of the score under the given hypothesis."""
    out = model.dist(hyp).pdf(s)
    return float(out) if np.isscalar(s) else out


def cdf(model: ScoreModel, hyp: Hypothesis, s):
    """Conditional CDF of the score under the given hypothesis."""
    out = model.dist(hyp).cdf(s)
    return float(out) if np.isscalar(s) else out


def likelihood_ratio(model: ScoreModel, s):
    """Ratio f1(s)/f0(s).

    Returns +inf where f0 vanishes but f1 does not, and 1.0 by convention
    where both vanish.
    """
    f0 = np.asarray(model.f0.pdf(s), dtype=float)
    f1 = np.asarray(model.f1.pdf(s), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lam = np.where(
            f0 > 0.0,
            f1 / np.where(f0 > 0.0, f0, 1.0),
            np.where(f1 > 0.0, np.inf, 1.0),
        )
    return float(lam) if np.isscalar(s) else lam


@dataclass(frozen=True)
class FlatInterval:
    """Score interval on which the likelihood ratio is numerically constant."""

    lo: float
    hi: float
    value: float


@dataclass(frozen=True)
class ValidationReport:
    """Result of the model sanity checks; carries flags, never raises."""

    f0_integral: float
    f1_integral: float
    f0_integral_ok: bool
    f1_integral_ok: bool
    f0_min_interior: float
    f0_positive_ok: bool
    flat_intervals: tuple[FlatInterval, ...]
    flatness_ok: bool

    @property
    def all_passed(self) -> bool:
        return (
            self.f0_integral_ok
            and self.f1_integral_ok
            and self.f0_positive_ok
            and self.flatness_ok
        )


def _density_integral(dist: Distribution, support: tuple[float, float]) -> float:
    lo = min(float(dist.ppf(1e-13)), support[0])
    hi = max(float(dist.ppf(1.0 - 1e-13)), support[1])
    pts = [b for b in dist.breakpoints() if lo < b < hi] or None
    val, _ = integrate.quad(lambda x: float(dist.pdf(x)), lo, hi, points=pts, limit=400)
    return val


@lru_cache(maxsize=64)
def _flat_intervals(model: ScoreModel) -> tuple[FlatInterval, ...]:
    """Maximal grid intervals wider than support/1000 with LR range <= tol."""
    s_lo, s_hi = model.support
    s = np.linspace(s_lo, s_hi, _SCAN_POINTS)
    lam = likelihood_ratio(model, s)
    min_width = model.support_width * FLAT_WIDTH_FRACTION
    found: list[FlatInterval] = []
    i = 0
    n = len(s)
    while i < n - 1:
        if not np.isfinite(lam[i]):
            i += 1
            continue
        lo = hi = lam[i]
        j = i + 1
        while j < n and np.isfinite(lam[j]):
            nlo, nhi = min(lo, lam[j]), max(hi, lam[j])
            if nhi - nlo > FLATNESS_TOL:
                break
            lo, hi = nlo, nhi
            j += 1
        if s[j - 1] - s[i] > min_width:
            found.append(FlatInterval(float(s[i]), float(s[j - 1]), float(0.5 * (lo + hi))))
        i = max(i + 1, j - 1)
    return tuple(found)


@lru_cache(maxsize=64)
def validate(model: ScoreModel) -> ValidationReport:
    """Run the model sanity checks and return a report with pass/fail flags.

    Checks: each density integrates to 1 within 1e-6 (quadrature), f0 is
    strictly positive on the support interior, and no likelihood-ratio
    plateau wider than support/1000 exists (flatness scan).
    """
    i0 = _density_integral(model.f0, model.support)
    i1 = _density_integral(model.f1, model.support)
    s_lo, s_hi = model.support
    eps = model.support_width * 1e-6
    interior = np.linspace(s_lo + eps, s_hi - eps, 4001)
    f0_min = float(np.min(model.f0.pdf(interior)))
    flats = _flat_intervals(model)
    return ValidationReport(
        f0_integral=i0,
        f1_integral=i1,
        f0_integral_ok=abs(i0 - 1.0) <= 1e-6,
        f1_integral_ok=abs(i1 - 1.0) <= 1e-6,
        f0_min_interior=f0_min,
        f0_positive_ok=f0_min > 0.0,
        flat_intervals=flats,
        flatness_ok=not flats,
    )


def central_mass_interval(model: ScoreModel, mass: float = 0.99) -> tuple[float, float]:
    """Score interval where both distributions hold their central ``mass``."""
    a = 0.5 * (1.0 - mass)
    lo = max(float(model.f0.ppf(a)), float(model.f1.ppf(a)))
    hi = min(float(model.f0.ppf(1.0 - a)), float(model.f1.ppf(1.0 - a)))
    return lo, hi


# ---------------------------------------------------------------------------
# JSON model specs
# ---------------------------------------------------------------------------

_FAMILY_PARAMS = {
    "gaussian": {"mu", "sigma"},
    "gaussian_mixture": {"components"},
    "uniform": {"a", "b"},
    "piecewise_linear": {"knots"},
}


def _parse_distribution(obj, label: str) -> Distribution:
    if not isinstance(obj, dict):
        raise ModelSpecError(f"{label}: expected an object")
    unknown = set(obj) - {"family", "params"}
    if unknown:
        raise ModelSpecError(f"{label}: unknown fields {sorted(unknown)}")
    family = obj.get("family")
    params = obj.get("params")
    if family not in _FAMILY_PARAMS:
        raise ModelSpecError(f"{label}: unknown family {family!r}")
    if not isinstance(params, dict):
        raise ModelSpecError(f"{label}: params must be an object")
    bad = set(params) - _FAMILY_PARAMS[family]
    if bad:
        raise ModelSpecError(f"{label}: unknown params {sorted(bad)} for family {family!r}")
    missing = _FAMILY_PARAMS[family] - set(params)
    if missing:
        raise ModelSpecError(f"{label}: missing params {sorted(missing)} for family {family!r}")
    try:
        if family == "gaussian":
            return Gaussian(float(params["mu"]), float(params["sigma"]))
        if family == "gaussian_mixture":
            comps = tuple((float(w), float(mu), float(sg)) for w, mu, sg in params["components"])
            return GaussianMixture(comps)
        if family == "uniform":
            return Uniform(float(params["a"]), float(params["b"]))
        return PiecewiseLinear(tuple((float(x), float(y)) for x, y in params["knots"]))
    except ModelSpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise ModelSpecError(f"{label}: malformed params: {exc}") from exc


def parse_model(obj) -> ScoreModel:
    """Build a :class:`ScoreModel` from a parsed JSON object.

    The spec format is ``{"f0": {"family": ..., "params": {...}}, "f1": {...},
    "tail_mass": optional}``; unknown fields are rejected.
    """
    if not isinstance(obj, dict):
        raise ModelSpecError("model spec: expected a JSON object")
    unknown = set(obj) - {"f0", "f1", "tail_mass"}
    if unknown:
        raise ModelSpecError(f"model spec: unknown fields {sorted(unknown)}")
    if "f0" not in obj or "f1" not in obj:
        raise ModelSpecError("model spec: both f0 and f1 are required")
    f0 = _parse_distribution(obj["f0"], "f0")
    f1 = _parse_distribution(obj["f1"], "f1")
    tail = obj.get("tail_mass", 1e-9)
    if not isinstance(tail, (int, float)):
        raise ModelSpecError("model spec: tail_mass must be a number")
    return ScoreModel(f0, f1, float(tail))


def load_model(path) -> ScoreModel:
    """Load a model spec from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelSpecError(f"cannot read model spec {path}: {exc}") from exc
    return parse_model(obj)
