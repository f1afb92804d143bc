"""Command-line pipeline: fit, warp, fpca, simulate, diagnose.

Stages are chained through files rather than an in-memory session, so each
step is independently reproducible: ``fit`` writes the selected window and
rate estimates as JSON, ``warp`` turns panel + fit artifact into a warp
CSV, ``fpca`` decomposes a warp CSV, ``simulate`` runs the Monte Carlo
study, and ``diagnose`` emits second-order model residuals.

Exit codes are a stable contract: 0 success, 2 input error, 3 numerical
failure, 4 configuration error. Outputs are written only after the whole
computation succeeds, and identical inputs plus an identical seed yield
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import simulate as sim
from .errors import (
    ConfigError,
    DegenerateRegressorError,
    EmptyPanelError,
    EmptySampleError,
    GridError,
    MissingDataError,
    NumericalError,
    RateError,
    SampleSizeError,
    SchemaError,
    WindowError,
)
from .fpca import (
    eigenfunctions_to_csv,
    fit_fpca,
    model_to_json_dict,
    modes_of_variation,
    modes_to_csv,
    score_rate_regression,
)
from .growthfit import (
    DEFAULT_WINDOW_LENGTHS,
    WindowFit,
    estimate_alphas,
    search_interval,
)
from .timeseries import Panel, PriceSeries, month_index, month_label, parse_panel, restrict
from .warping import compute_warp_set, second_order_diagnostic, warps_from_csv, warps_to_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4

_INPUT_ERRORS = (
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    SchemaError,
    GridError,
    MissingDataError,
    EmptyPanelError,
    WindowError,
    ValueError,
    KeyError,
    json.JSONDecodeError,
)
_NUMERICAL_ERRORS = (
    RateError,
    NumericalError,
    EmptySampleError,
    SampleSizeError,
    DegenerateRegressorError,
    IndexError,
    np.linalg.LinAlgError,
)


def _parse_month(token: str) -> int:
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        return month_index(token)


def _parse_window(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"--window must be START:END, got {text!r}")
    return _parse_month(parts[0]), _parse_month(parts[1])


def _parse_lengths(text: str) -> tuple[int, ...]:
    try:
        lengths = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise ConfigError(f"--window-lengths must be comma-separated integers, got {text!r}") from None
    if not lengths or any(l < 3 for l in lengths):
        raise ConfigError(f"window lengths must be at least 3 months, got {text!r}")
    return lengths


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_json(path: Path, obj) -> None:
    _write_text(path, json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def _read_panel(path: str) -> Panel:
    with open(path) as fh:
        return parse_panel(fh.read())


def _read_fit_artifact(path: Path) -> dict:
    with open(path) as fh:
        artifact = json.load(fh)
    for key in ("window", "alpha_estimates", "analysis"):
        if key not in artifact:
            raise SchemaError(f"fit artifact {path} is missing {key!r}")
    return artifact


def _fits_from_artifact(artifact: dict) -> list[WindowFit]:
    window = (artifact["window"]["start"], artifact["window"]["end"])
    fits = []
    for row in artifact["alpha_estimates"]["per_series"]:
        fits.append(
            WindowFit(
                series_name=row["name"],
                window=window,
                alpha=row["alpha"],
                intercept=row["intercept"],
                r2=row["r2"],
                clamped=row.get("clamped", False),
            )
        )
    return fits


def _restricted_panel(args) -> tuple[Panel, list[str], tuple[int, int]]:
    panel = _read_panel(args.input)
    window = _parse_window(args.window) if args.window else (panel.grid.start_month, panel.grid.end_month)
    panel, dropped = restrict(panel, *window)
    return panel, dropped, window


def cmd_fit(args) -> int:
    panel, dropped, restriction = _restricted_panel(args)
    lengths = _parse_lengths(args.window_lengths)
    result = search_interval(panel, lengths)
    estimates = estimate_alphas(panel, result.best_window)

    artifact = result.to_json_dict()
    artifact["alpha_estimates"] = {
        "per_series": [
            {
                "name": f.series_name,
                "alpha": f.alpha,
                "intercept": f.intercept,
                "r2": f.r2,
                "clamped": f.clamped,
            }
            for f in estimates.fits
        ],
        "mean_alpha": estimates.mean_alpha,
        "sd_alpha": estimates.sd_alpha,
    }
    artifact["analysis"] = {
        "restriction": {"start": restriction[0], "end": restriction[1]},
        "dropped_series": dropped,
        "panel_start": panel.grid.start_month,
        "panel_end": panel.grid.end_month,
    }
    out = Path(args.output_dir)
    _write_json(out / "fit.json", artifact)
    start, end = result.best_window
    print(
        f"fit: window {month_label(start)}..{month_label(end)} ({result.window_length_months} months), "
        f"mean R2 {result.mean_r2:.4f}, mean alpha {estimates.mean_alpha * 100:.3f}%/month "
        f"({panel.n_series} series, {len(dropped)} dropped)"
    )
    return EXIT_OK


def _warps_for_artifact(args, artifact: dict):
    panel = _read_panel(args.input)
    analysis = artifact["analysis"]
    panel, _ = restrict(panel, analysis["restriction"]["start"], analysis["restriction"]["end"])
    fits = _fits_from_artifact(artifact)
    start = artifact["window"]["start"]
    t0 = artifact["window"]["end"]
    return panel, compute_warp_set(panel, fits, window_start_month=start, t0_month=t0)


def cmd_warp(args) -> int:
    artifact = _read_fit_artifact(_fit_path(args))
    _, warpset = _warps_for_artifact(args, artifact)

    setbacks = io.StringIO()
    writer = csv.writer(setbacks, lineterminator="\n")
    writer.writerow(["name", "alpha", "h_end", "setback_normalized", "setback_months", "reliable"])
    months = warpset.grid.elapsed_months
    for w in warpset.warps:
        writer.writerow(
            [
                w.series_name,
                f"{w.alpha_used:.17g}",
                f"{w.values[-1]:.17g}",
                f"{w.setback:.17g}",
                f"{w.setback * months:.17g}",
                int(w.reliable),
            ]
        )

    out = Path(args.output_dir)
    _write_text(out / "warps.csv", warps_to_csv(warpset))
    _write_text(out / "setbacks.csv", setbacks.getvalue())
    mean_setback = float(np.mean([w.setback for w in warpset.warps]))
    print(
        f"warp: {warpset.n_series} series on {warpset.grid.n_points} points, "
        f"mean time setback {mean_setback * months:.1f} months"
    )
    return EXIT_OK


def cmd_fpca(args) -> int:
    with open(args.input) as fh:
        warpset = warps_from_csv(fh.read())
    exclude = tuple(name.strip() for name in args.exclude.split(",") if name.strip()) if args.exclude else ()
    if args.k is not None and args.k < 1:
        raise ConfigError(f"--k must be at least 1, got {args.k}")
    if not 0 < args.var_threshold <= 1:
        raise ConfigError(f"--var-threshold must be in (0, 1], got {args.var_threshold}")
    model = fit_fpca(warpset, exclude=exclude, k=args.k, var_threshold=args.var_threshold)

    scores_csv = io.StringIO()
    writer = csv.writer(scores_csv, lineterminator="\n")
    writer.writerow(["name", "out_of_sample", *(f"score_{k + 1}" for k in range(model.n_retained))])
    for i, name in enumerate(model.score_names):
        writer.writerow(
            [name, int(model.out_of_sample[i]), *(f"{s:.17g}" for s in model.scores[i])]
        )

    regression = None
    fit_path = _fit_path(args)
    if fit_path.exists():
        artifact = _read_fit_artifact(fit_path)
        alphas = {row["name"]: row["alpha"] for row in artifact["alpha_estimates"]["per_series"]}
        in_sample = [
            (i, name)
            for i, name in enumerate(model.score_names)
            if not model.out_of_sample[i] and name in alphas
        ]
        if len(in_sample) >= 3:
            rows = np.array([model.scores[i] for i, _ in in_sample])
            rates = np.array([alphas[name] for _, name in in_sample])
            lines = score_rate_regression(rows, rates)
            regression = {
                "n": len(in_sample),
                "components": [
                    {"component": k + 1, "slope": l.slope, "intercept": l.intercept, "correlation": l.correlation}
                    for k, l in enumerate(lines)
                ],
            }

    out = Path(args.output_dir)
    _write_json(out / "fpca_model.json", model_to_json_dict(model))
    _write_text(out / "eigenfunctions.csv", eigenfunctions_to_csv(model))
    _write_text(out / "scores.csv", scores_csv.getvalue())
    for k in (1, 2):
        if k <= model.n_retained:
            _write_text(out / f"modes_k{k}.csv", modes_to_csv(modes_of_variation(model, k), model.grid))
    if regression is not None:
        _write_json(out / "score_alpha_regression.json", regression)

    shares = ", ".join(f"{v:.1%}" for v in model.var_explained[:2])
    print(
        f"fpca: {model.n_sample} series in sample, {model.n_retained} components retained, "
        f"leading variance shares {shares}"
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.truth and args.default_truth:
        raise ConfigError("pass either --truth or --default-truth, not both")
    if args.truth:
        truth = sim.load_truth(args.truth)
    elif args.default_truth:
        truth = sim.default_truth()
    else:
        raise ConfigError("simulate needs --truth MANIFEST or --default-truth")
    if args.replicates < 1:
        raise ConfigError(f"--replicates must be at least 1, got {args.replicates}")
    if args.threads < 1:
        raise ConfigError(f"--threads must be at least 1, got {args.threads}")

    report = sim.run_study(truth, args.replicates, seed=args.seed, n_jobs=args.threads)
    sweep = None
    if args.convergence_sweep:
        sweep = sim.convergence_sweep(truth, (25, 100, 400), repeats=50, seed=args.seed)

    out = Path(args.output_dir)
    _write_json(out / "sim_report.json", report.to_json_dict())
    _write_text(out / "sim_replicates.csv", report.replicates_to_csv())
    if sweep is not None:
        _write_json(out / "convergence.json", sweep.to_json_dict())
        _write_text(out / "convergence.csv", sweep.to_csv())

    agg = report.aggregates
    ase = agg.get("ase", {}).get("mean", float("nan"))
    ve2 = agg.get("var_explained_2", {}).get("mean", float("nan"))
    print(
        f"simulate: {report.n_replicates} replicates ({report.n_failed} failed), "
        f"ASE mean {ase:.4g}, variance explained by 2 components {ve2:.1%} "
        f"(housing-study reference: ASE 0.011, 96%)"
    )
    return EXIT_OK


def cmd_diagnose(args) -> int:
    artifact = _read_fit_artifact(_fit_path(args))
    panel, warpset = _warps_for_artifact(args, artifact)
    lo = panel.grid.index_of(warpset.grid.start_month)

    residuals = []
    for w in warpset.warps:
        s = panel.get(w.series_name)
        window_series = PriceSeries(s.name, s.values[lo:], s.missing[lo:])
        residuals.append(second_order_diagnostic(window_series, w, w.alpha_used))

    table = io.StringIO()
    writer = csv.writer(table, lineterminator="\n")
    writer.writerow(["t_normalized", *warpset.names])
    t = warpset.grid.points
    for i in range(warpset.grid.n_points):
        writer.writerow([f"{t[i]:.17g}", *(f"{r[i]:.17g}" for r in residuals)])

    summary = {
        "per_series": [
            {"name": w.series_name, "max_abs_residual": float(np.abs(r).max())}
            for w, r in zip(warpset.warps, residuals)
        ]
    }
    out = Path(args.output_dir)
    _write_text(out / "diagnostics.csv", table.getvalue())
    _write_json(out / "diagnostics_summary.json", summary)
    worst = max(row["max_abs_residual"] for row in summary["per_series"])
    print(f"diagnose: {warpset.n_series} series, largest second-order residual {worst:.4g}")
    return EXIT_OK


def _fit_path(args) -> Path:
    return Path(args.fit) if args.fit else Path(args.output_dir) / "fit.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpgrowth",
        description="Time-warped growth analysis of price index panels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="select the undisturbed window and estimate growth rates")
    fit.add_argument("--input", required=True, help="panel CSV (date,<market>,... rows of YYYY-MM)")
    fit.add_argument("--output-dir", required=True)
    fit.add_argument("--window-lengths", default=",".join(str(l) for l in DEFAULT_WINDOW_LENGTHS))
    fit.add_argument("--window", default=None, help="restrict the panel to START:END month indices or YYYY-MM labels")
    fit.set_defaults(func=cmd_fit)

    warp = sub.add_parser("warp", help="recover warping functions from a fit artifact")
    warp.add_argument("--input", required=True, help="panel CSV")
    warp.add_argument("--output-dir", required=True)
    warp.add_argument("--fit", default=None, help="fit artifact path (default: OUTPUT_DIR/fit.json)")
    warp.set_defaults(func=cmd_warp)

    fpca = sub.add_parser("fpca", help="functional PCA of a warp CSV")
    fpca.add_argument("--input", required=True, help="warp CSV from the warp stage")
    fpca.add_argument("--output-dir", required=True)
    fpca.add_argument("--fit", default=None, help="fit artifact for the score-vs-rate regression")
    fpca.add_argument("--exclude", default=None, help="comma-separated series to hold out of estimation")
    fpca.add_argument("--k", type=int, default=None, help="retain exactly K components")
    fpca.add_argument("--var-threshold", type=float, default=0.999)
    fpca.set_defaults(func=cmd_fpca)

    simulate = sub.add_parser("simulate", help="run the Monte Carlo estimation study")
    simulate.add_argument("--output-dir", required=True)
    simulate.add_argument("--truth", default=None, help="truth manifest JSON")
    simulate.add_argument("--default-truth", action="store_true")
    simulate.add_argument("--replicates", type=int, default=100)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--threads", type=int, default=1)
    simulate.add_argument("--convergence-sweep", action="store_true")
    simulate.set_defaults(func=cmd_simulate)

    diagnose = sub.add_parser("diagnose", help="second-order model residuals per series")
    diagnose.add_argument("--input", required=True, help="panel CSV")
    diagnose.add_argument("--output-dir", required=True)
    diagnose.add_argument("--fit", default=None, help="fit artifact path (default: OUTPUT_DIR/fit.json)")
    diagnose.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"warpgrowth {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"warpgrowth {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _INPUT_ERRORS as exc:
        print(f"warpgrowth {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
