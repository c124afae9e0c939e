"""Command-line front end.

Subcommands cover the whole pipeline: ``svt`` (curve generation),
``concavity`` (slope-monotonicity report), ``optimize`` (optimal-curve
construction), ``oracle`` (direct computation from the densities), ``hull``
(randomization baseline), ``regions`` (decision-region recovery) and
``verify`` (construction-vs-direct dominance report, scriptable via its
exit status).

Exit codes: 0 success, 1 verify tolerance breach, 2 parse/usage failure,
3 model validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from . import builder, oracle, roc
from .models import ModelSpecError, ScoreModel, load_model, validate
from .roc import DegenerateModelError, RocCurve

__all__ = ["RunConfig", "run", "main"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_MODEL_INVALID = 3

_COMMANDS = ("svt", "concavity", "optimize", "oracle", "hull", "regions", "verify")
_MODEL_ONLY = ("oracle", "regions", "verify")


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: one command plus its inputs and outputs."""

    command: str
    model_path: Optional[str] = None
    samples_path: Optional[str] = None
    n_points: int = 2001
    eta: Optional[float] = None
    tol: Optional[float] = None
    out: Optional[str] = None
    plot: Optional[str] = None

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if (self.model_path is None) == (self.samples_path is None):
            raise ValueError("exactly one of --model/--samples is required")
        if self.command in _MODEL_ONLY and self.model_path is None:
            raise ValueError(f"{self.command} requires --model")
        if self.command == "regions" and self.eta is None:
            raise ValueError("regions requires --eta")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_validated_model(path: str) -> ScoreModel:
    model = load_model(path)
    report = validate(model)
    if not (report.f0_integral_ok and report.f1_integral_ok):
        raise DegenerateModelError(
            "density does not integrate to 1 "
            f"(f0: {report.f0_integral:.9f}, f1: {report.f1_integral:.9f})"
        )
    if not report.flatness_ok:
        flats = ", ".join(
            f"[{f.lo:.6g}, {f.hi:.6g}] at ratio {f.value:.6g}" for f in report.flat_intervals
        )
        print(
            f"warning: likelihood ratio is constant on {flats}; "
            "optimality on such models is not guaranteed",
            file=sys.stderr,
        )
    return model


def _input_curve(config: RunConfig) -> tuple[RocCurve, Optional[ScoreModel]]:
    """SVT curve from a model spec, or empirical curve from samples."""
    if config.model_path is not None:
        model = _load_validated_model(config.model_path)
        return roc.svt_roc(model, config.n_points), model
    with open(config.samples_path, "r", encoding="utf-8", newline="") as fh:
        h0, h1 = roc.read_samples_csv(fh)
    return roc.empirical_svt_roc(h0, h1), None


def _curve_csv(curve: RocCurve, config: RunConfig) -> None:
    _emit(roc.curve_csv_bytes(curve).decode(), config.out)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _plot_curves(config: RunConfig, curves, labels, title) -> None:
    if config.plot:
        from . import plots

        plots.save_curves_figure(curves, labels, config.plot, title=title)


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    cmd = config.command

    if cmd == "svt":
        curve, _ = _input_curve(config)
        _curve_csv(curve, config)
        _plot_curves(config, [curve], [curve.kind], "score-threshold ROC")
        return EXIT_OK

    if cmd == "concavity":
        curve, _ = _input_curve(config)
        tol = config.tol if config.tol is not None else roc.default_concavity_tol(curve)
        report = roc.is_concave(curve, tol)
        _emit(
            _json_text(
                {
                    "concave": report.concave,
                    "first_violation": report.first_violation,
                    "max_violation": report.max_violation,
                    "tol": report.tol,
                }
            ),
            config.out,
        )
        _plot_curves(config, [curve], [curve.kind], "concavity check")
        return EXIT_OK

    if cmd == "optimize":
        curve, _ = _input_curve(config)
        built = builder.build_optimal_roc(curve)
        _curve_csv(built, config)
        _plot_curves(
            config, [curve, built], [curve.kind, "optimal (constructed)"], "optimal ROC"
        )
        return EXIT_OK

    if cmd == "oracle":
        curve, model = _input_curve(config)
        etas = oracle.grid_eta_values(model, curve)
        direct = oracle.lrt_roc_direct(model, etas)
        _curve_csv(direct, config)
        _plot_curves(config, [curve, direct], [curve.kind, "direct"], "direct optimal ROC")
        return EXIT_OK

    if cmd == "hull":
        curve, _ = _input_curve(config)
        hull = oracle.randomized_hull(curve)
        _curve_csv(hull, config)
        _plot_curves(config, [curve, hull], [curve.kind, "hull"], "randomization hull")
        return EXIT_OK

    if cmd == "regions":
        curve, model = _input_curve(config)
        profile = roc.slope_profile(curve)
        region = builder.recover_regions(curve, profile, config.eta)
        _emit(_json_text(builder.regions_json_obj(region, config.eta)), config.out)
        if config.plot:
            from . import plots

            plots.save_regions_figure(
                profile, config.eta, region, config.plot, title="recovered decision region"
            )
        return EXIT_OK

    if cmd == "verify":
        curve, model = _input_curve(config)
        built = builder.build_optimal_roc(curve)
        direct = oracle.lrt_roc_direct(model, oracle.grid_eta_values(model, curve))
        tol = config.tol if config.tol is not None else 1e-3
        report = oracle.dominance_check(built, direct, tol)
        _emit(_json_text(oracle.dominance_json_obj(report)), config.out)
        _plot_curves(
            config,
            [curve, built, direct],
            [curve.kind, "constructed", "direct"],
            "construction vs direct computation",
        )
        breached = max(abs(report.max_gap), abs(report.min_gap)) > tol
        return EXIT_VERIFY_FAILED if breached else EXIT_OK

    raise AssertionError(f"unhandled command {cmd!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rocrepair",
        description=(
            "Generate score-threshold ROC curves, test them for concavity, and "
            "construct the optimal (likelihood-ratio) ROC curve by slope-thresholded "
            "segment summation, with an independent direct computation to verify."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "svt": "emit the score-threshold ROC curve as CSV",
        "concavity": "report whether the curve's slope is nonincreasing",
        "optimize": "construct the optimal ROC curve from the input curve",
        "oracle": "compute the optimal ROC directly from the densities",
        "hull": "emit the least concave majorant (randomization baseline)",
        "regions": "recover the decision region for a threshold (model mode)",
        "verify": "compare constructed vs direct curves; exit 1 on breach",
    }
    for name in _COMMANDS:
        p = sub.add_parser(name, help=descriptions[name])
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--model", dest="model_path", help="model spec JSON path")
        if name not in _MODEL_ONLY:
            src.add_argument(
                "--samples", dest="samples_path", help="score,label samples CSV path"
            )
        p.add_argument("--n-points", type=int, default=2001, help="curve grid size")
        if name in ("regions",):
            p.add_argument("--eta", type=float, required=True, help="threshold value")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--plot", default=None, help="also render a figure to this path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            model_path=args.model_path,
            samples_path=getattr(args, "samples_path", None),
            n_points=args.n_points,
            eta=getattr(args, "eta", None),
            tol=args.tol,
            out=args.out,
            plot=args.plot,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    try:
        return run(config)
    except (ModelSpecError, FileNotFoundError, ValueError) as exc:
        if isinstance(exc, (DegenerateModelError, oracle.FlatLevelSetError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MODEL_INVALID
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR


if __name__ == "__main__":
    sys.exit(main())
