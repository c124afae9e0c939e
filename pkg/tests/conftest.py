"""Shared model fixtures and acceptance-suite reporting."""

import pytest

from rocrepair import Gaussian, GaussianMixture, ScoreModel, Uniform

# Tight-truncation variants keep support-clipping artifacts (at most the
# excluded tail mass) far below the strictest comparison tolerances.
TIGHT_TAIL = 1e-12


@pytest.fixture(scope="session")
def gauss_shift():
    """Equal-variance Gaussian shift: monotone likelihood ratio, concave ROC."""
    return ScoreModel(Gaussian(0.0, 1.0), Gaussian(1.0, 1.0))


@pytest.fixture(scope="session")
def gauss_shift_tight():
    return ScoreModel(Gaussian(0.0, 1.0), Gaussian(1.0, 1.0), tail_mass=TIGHT_TAIL)


@pytest.fixture(scope="session")
def mixture():
    """Centered null vs symmetric bimodal alternative: non-concave SVT ROC."""
    return ScoreModel(
        Gaussian(0.0, 1.0), GaussianMixture(((0.5, -2.0, 1.0), (0.5, 2.0, 1.0)))
    )


@pytest.fixture(scope="session")
def mixture_tight():
    return ScoreModel(
        Gaussian(0.0, 1.0),
        GaussianMixture(((0.5, -2.0, 1.0), (0.5, 2.0, 1.0))),
        tail_mass=TIGHT_TAIL,
    )


@pytest.fixture(scope="session")
def identical():
    """f0 == f1: the ROC is the diagonal and every ratio equals one."""
    return ScoreModel(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))


@pytest.fixture(scope="session")
def flat_uniform():
    """Identical uniforms: constant likelihood ratio, fails the flatness scan."""
    return ScoreModel(Uniform(0.0, 1.0), Uniform(0.0, 1.0))


def pytest_runtest_logreport(report):
    """Print one status line per acceptance criterion as it finishes."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {status}", flush=True)
