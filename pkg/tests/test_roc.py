"""Tests for SVT ROC generation, slope profiles, concavity and CSV formats."""

import io

import numpy as np
import pytest
from scipy import integrate
from scipy.optimize import brentq
from scipy.stats import norm

from rocrepair import (
    DegenerateModelError,
    Gaussian,
    RocCurve,
    ScoreModel,
    Uniform,
    central_mass_interval,
    default_concavity_tol,
    empirical_svt_roc,
    is_concave,
    likelihood_ratio,
    read_curve_csv,
    read_samples_csv,
    slope_profile,
    svt_roc,
    write_curve_csv,
    write_samples_csv,
)

# Area under the equal-variance Gaussian-shift ROC: standard normal CDF at
# 1/sqrt(2), derived in closed form and cross-checked by quadrature below.
AUC_GAUSS_SHIFT = 0.7602499389065233


class TestSvtRoc:
    def test_identical_pdfs_give_diagonal(self, identical):
        curve = svt_roc(identical, 101)
        assert curve.n == 101
        assert curve.kind == "svt"
        assert np.max(np.abs(curve.pd - curve.pf)) <= 1e-12

    def test_gauss_shift_auc(self, gauss_shift):
        curve = svt_roc(gauss_shift, 1001)
        assert curve.auc() == pytest.approx(AUC_GAUSS_SHIFT, abs=1e-4)

    def test_auc_against_quadrature_oracle(self, gauss_shift):
        """Trapezoid AUC agrees with direct quadrature of the exact curve."""
        exact, err = integrate.quad(
            lambda pf: 1 - norm.cdf(norm.ppf(1 - pf) - 1), 0, 1, limit=200
        )
        assert abs(exact - AUC_GAUSS_SHIFT) <= 1e-8 + err
        assert svt_roc(gauss_shift, 2001).auc() == pytest.approx(exact, abs=1e-4)

    def test_mixture_curve_is_not_concave(self, mixture):
        curve = svt_roc(mixture, 2001)
        report = is_concave(curve, tol=1e-9)
        assert not report.concave
        # dense scan oracle: the analytic ratio is non-monotone along the curve
        lam = likelihood_ratio(mixture, np.asarray(curve.gamma)[::-1])
        finite = np.isfinite(lam)
        assert np.any(np.diff(lam[finite]) < 0)

    def test_mixture_dips_below_chord(self, mixture):
        """Somewhere the curve falls below the straight line between endpoints."""
        curve = svt_roc(mixture, 2001)
        chord = curve.pf * (curve.pd[-1] - curve.pd[0]) + curve.pd[0]
        assert np.min(curve.pd - chord) < -0.1

    def test_gamma_tags_strictly_decreasing(self, mixture):
        curve = svt_roc(mixture, 501)
        assert np.all(np.diff(curve.gamma) < 0)

    def test_endpoints_near_corners(self, mixture):
        curve = svt_roc(mixture, 501)
        assert curve.pf[0] <= 2 * mixture.tail_mass
        assert curve.pd[0] <= 2 * mixture.tail_mass
        assert curve.pf[-1] >= 1 - 2 * mixture.tail_mass
        assert curve.pd[-1] >= 1 - 2 * mixture.tail_mass

    def test_too_few_points_rejected(self, gauss_shift):
        with pytest.raises(ValueError):
            svt_roc(gauss_shift, 2)

    def test_degenerate_null_rejected(self):
        model = ScoreModel(Uniform(0, 1), Uniform(0, 2))
        with pytest.raises(DegenerateModelError, match="degenerate null density"):
            svt_roc(model, 101)

    def test_pf_grid_equally_spaced(self, gauss_shift):
        curve = svt_roc(gauss_shift, 1001)
        inner = np.diff(curve.pf[1:-1])
        assert np.max(np.abs(inner - 1e-3)) <= 1e-9

    def test_reparameterized_thresholds_same_curve(self, gauss_shift):
        """pd at equal pf is grid-parameterization independent.

        Thresholds recomputed by an unrelated root-finder on the CDF give
        the same curve values as the quantile-based grid.
        """
        curve = svt_roc(gauss_shift, 201)
        s_lo, s_hi = gauss_shift.support
        for k in range(1, curve.n - 1):
            target = 1.0 - curve.pf[k]
            gamma2 = brentq(
                lambda s: float(gauss_shift.f0.cdf(s)) - target,
                s_lo,
                s_hi,
                xtol=1e-14,
                rtol=8.9e-16,
            )
            pd2 = 1.0 - float(gauss_shift.f1.cdf(gamma2))
            assert abs(pd2 - curve.pd[k]) <= 1e-12


class TestSlopeProfile:
    def test_diagonal_slopes_are_one(self, identical):
        prof = slope_profile(svt_roc(identical, 101))
        assert np.max(np.abs(prof.slope - 1.0)) <= 1e-9

    def test_slope_at_unit_ratio_threshold(self, gauss_shift):
        curve = svt_roc(gauss_shift, 2001)
        prof = slope_profile(curve)
        i = int(np.argmin(np.abs(prof.gamma_mid - 0.5)))
        assert prof.slope[i] == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("model_name", ["gauss_shift", "mixture"])
    def test_matches_likelihood_ratio_centrally(self, model_name, request):
        """Secant slopes reproduce the analytic ratio on the central mass."""
        model = request.getfixturevalue(model_name)
        curve = svt_roc(model, 4001)
        prof = slope_profile(curve)
        lo, hi = central_mass_interval(model, 0.99)
        sel = (prof.gamma_mid >= lo) & (prof.gamma_mid <= hi)
        lam = likelihood_ratio(model, prof.gamma_mid[sel])
        rel = np.abs(prof.slope[sel] - lam) / lam
        assert np.max(rel) <= 1e-2

    def test_two_point_curve_has_one_entry(self):
        curve = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]), None, kind="svt")
        assert slope_profile(curve).n == 1

    def test_single_point_rejected(self):
        """Degenerate inputs fail fast: as a curve, or in the profile guard."""

        class Stub:
            n = 1
            pf = np.array([0.5])
            pd = np.array([0.5])
            gamma = None

        with pytest.raises(ValueError, match="at least two points"):
            RocCurve(np.array([0.5]), np.array([0.5]), None, kind="svt")
        with pytest.raises(ValueError, match="curve too short"):
            slope_profile(Stub())

    def test_skips_negligible_pf_steps(self):
        pf = np.array([0.0, 0.5, 0.5 + 1e-16, 1.0])
        pd = np.array([0.0, 0.6, 0.8, 1.0])
        prof = slope_profile(RocCurve(pf, pd, None, kind="svt"))
        assert prof.n == 2


class TestIsConcave:
    def test_gauss_shift_concave(self, gauss_shift):
        report = is_concave(svt_roc(gauss_shift, 1001), tol=1e-9)
        assert report.concave
        assert report.first_violation is None

    def test_mixture_first_violation_at_ratio_minimum(self, mixture):
        """The slope starts increasing where the ratio has its minimum (pf=0.5)."""
        report = is_concave(svt_roc(mixture, 2001), tol=1e-9)
        assert not report.concave
        assert report.max_violation > 0
        assert report.first_violation == pytest.approx(0.5, abs=2e-3)

    def test_diagonal_concave_non_strict(self, identical):
        assert is_concave(svt_roc(identical, 101), tol=1e-9).concave


class TestEmpirical:
    def test_perfect_separation(self):
        curve = empirical_svt_roc([0.0], [1.0])
        assert curve.kind == "empirical"
        assert [(p.pf, p.pd) for p in curve.points] == [(0, 0), (0, 1), (1, 1)]

    def test_identical_samples(self):
        curve = empirical_svt_roc([0.0, 1.0], [0.0, 1.0])
        assert [(p.pf, p.pd) for p in curve.points] == [(0, 0), (0.5, 0.5), (1, 1)]

    def test_ties_stack_on_one_threshold(self):
        curve = empirical_svt_roc([0.0, 0.0, 1.0], [1.0, 1.0, 2.0])
        # the two tied H1 scores enter at a single threshold
        assert curve.n == 4
        i = int(np.argmin(np.abs(curve.pf - 1 / 3)))
        assert curve.pf[i] == pytest.approx(1 / 3, abs=1e-15)
        assert curve.pd[i] == 1.0

    def test_monte_carlo_auc(self, gauss_shift):
        rng = np.random.default_rng(42)
        h0 = rng.normal(0.0, 1.0, 100_000)
        h1 = rng.normal(1.0, 1.0, 100_000)
        curve = empirical_svt_roc(h0, h1)
        assert curve.auc() == pytest.approx(AUC_GAUSS_SHIFT, abs=0.01)
        assert curve.sample_sizes == (100_000, 100_000)

    def test_no_samples_rejected(self):
        with pytest.raises(ValueError, match="no samples"):
            empirical_svt_roc([], [1.0])

    def test_default_tol_scales_with_counts(self):
        curve = empirical_svt_roc(np.arange(400), np.arange(400) + 0.5)
        assert default_concavity_tol(curve) == pytest.approx(0.1)
        analytic = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]), None, kind="svt")
        assert default_concavity_tol(analytic) == 1e-9


class TestRichardsonRefinement:
    @pytest.mark.parametrize("n", [250, 500, 1000])
    @pytest.mark.parametrize("model_name", ["gauss_shift", "mixture"])
    def test_auc_grid_refinement(self, n, model_name, request):
        model = request.getfixturevalue(model_name)
        a1 = svt_roc(model, n).auc()
        a2 = svt_roc(model, 2 * n).auc()
        assert abs(a2 - a1) <= 4.0 / n**2


class TestCurveCsv:
    @pytest.mark.parametrize("tagged", [True, False])
    def test_round_trip_bitwise(self, mixture, tagged):
        curve = svt_roc(mixture, 101)
        if not tagged:
            curve = RocCurve(curve.pf, curve.pd, None, kind="svt")
        buf = io.StringIO()
        write_curve_csv(curve, buf)
        parsed = read_curve_csv(io.StringIO(buf.getvalue()), kind="svt")
        assert np.array_equal(parsed.pf, curve.pf)
        assert np.array_equal(parsed.pd, curve.pd)
        if tagged:
            assert np.array_equal(parsed.gamma, curve.gamma)
        else:
            assert parsed.gamma is None
        buf2 = io.StringIO()
        write_curve_csv(parsed, buf2)
        assert buf.getvalue() == buf2.getvalue()

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError, match="header"):
            read_curve_csv(io.StringIO("x,y\n0,0\n"))

    def test_mixed_gamma_rejected(self):
        text = "pf,pd,gamma\n0,0,1\n0.5,0.6,\n1,1,0\n"
        with pytest.raises(ValueError, match="mixes"):
            read_curve_csv(io.StringIO(text))


class TestSamplesCsv:
    def test_round_trip(self):
        buf = io.StringIO()
        write_samples_csv([0.5, -1.25], [2.0], buf)
        h0, h1 = read_samples_csv(io.StringIO(buf.getvalue()))
        assert list(h0) == [0.5, -1.25]
        assert list(h1) == [2.0]

    def test_bad_label_rejected(self):
        with pytest.raises(ValueError):
            read_samples_csv(io.StringIO("score,label\n0.5,2\n"))

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError):
            read_samples_csv(io.StringIO("value,cls\n0.5,1\n"))


class TestRocCurveType:
    def test_points_in_unit_square_enforced(self):
        with pytest.raises(ValueError):
            RocCurve(np.array([0.0, 1.5]), np.array([0.0, 1.0]), None, kind="svt")

    def test_strict_pf_for_analytic_kinds(self):
        with pytest.raises(ValueError):
            RocCurve(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.5, 1.0]), None, kind="svt")

    def test_vertical_steps_allowed_for_empirical(self):
        RocCurve(np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.5, 1.0]), None, kind="empirical")

    def test_pd_must_not_decrease(self):
        with pytest.raises(ValueError):
            RocCurve(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.6, 0.4]), None, kind="svt")

    def test_arrays_read_only(self, gauss_shift):
        curve = svt_roc(gauss_shift, 11)
        with pytest.raises(ValueError):
            curve.pf[0] = 0.5

    def test_interp_uses_upper_envelope_on_steps(self):
        curve = RocCurve(
            np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.8, 1.0]), None, kind="empirical"
        )
        assert curve.interp_pd(0.0) == 0.8
