"""`ghp-bounds` command line.

Subcommands: estimate, oracle, sweep, bench, sample. Results go to --output
(default stdout); failures print one JSON line {"error", "message"} on stderr
and exit 2 (input), 3 (validation) or 4 (internal).
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from ..core import config as config_mod
from ..core.errors import BadConfig, BoundsError, InputError, MalformedInput
from ..core.rng import check_seed
from ..core.types import SCHEMA_VERSION, BoundReport
from ..geometry.emst import MST_METHODS
from ..logging.log_writer import LogWriter
from ..oracle.gaussian import GaussianMixtureModel, binary_ber_closed_form
from ..synth.circle import CircleConfig, circle_model, sample
from . import io
from .experiments import SWEEP_KINDS, build_points, mse_by_point, parse_grid, run_bench, run_sweep
from .pipelines import estimate, oracle_bounds


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="64-bit seed (config default)")
    p.add_argument("--threads", type=int, default=None, help="worker threads (config default)")
    p.add_argument("--output", default=None, help="output path, stdout when omitted")
    p.add_argument("--config", default=None, help="alternative config.json")
    p.add_argument("--no-config", action="store_true", help="built-in defaults, no run log")
    p.add_argument("--mst-method", choices=MST_METHODS, default=None)


def _add_model(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    if with_file:
        p.add_argument("--model", default=None, help="JSON model file")
    p.add_argument("--m", type=int, default=None, help="circle model: number of classes")
    p.add_argument("--mu", type=float, default=1.0, help="circle radius")
    p.add_argument("--sigma2", type=float, default=0.3, help="per-coordinate variance")
    p.add_argument("--d", type=int, default=2, help="dimension")
    p.add_argument("--gamma", type=float, default=None, help="imbalance p_1 = gamma")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=config_mod.APP_NAME,
        description="Bayes error rate bounds from a single global Euclidean MST",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="bounds from a labelled CSV")
    est.add_argument("--input", required=True, help="CSV with a 'label' column")
    est.add_argument("--method", choices=("ghp", "pw", "both"), default="ghp")
    est.add_argument("--priors", choices=("empirical", "file"), default="empirical")
    est.add_argument("--priors-file", default=None)
    est.add_argument("--n-classes", type=int, default=None, help="declared class count")
    est.add_argument("--omit-timing", action="store_true", help="write runtime_ms as null")
    _add_common(est)

    orc = sub.add_parser("oracle", help="Monte Carlo ground truth for a Gaussian mixture")
    _add_model(orc)
    orc.add_argument("--mc-budget", type=int, default=None)
    orc.add_argument("--omit-timing", action="store_true", help="write runtime_ms as null")
    _add_common(orc)

    swp = sub.add_parser("sweep", help="plot-ready CSV over a parameter grid")
    swp.add_argument("--kind", choices=SWEEP_KINDS, required=True)
    swp.add_argument("--grid", required=True, help="comma-separated grid values")
    swp.add_argument("--trials", type=int, default=10)
    swp.add_argument("--n", type=int, default=2000, help="sample size per trial")
    swp.add_argument("--dims", default=None, help="n-convergence: comma-separated dimensions")
    swp.add_argument("--mse-output", default=None, help="also write per-point MSE table")
    swp.add_argument("--mc-budget", type=int, default=None)
    _add_model(swp, with_file=False)
    _add_common(swp)

    bench = sub.add_parser("bench", help="global-MST vs pairwise pipeline wall time")
    bench.add_argument("--m", type=int, default=10)
    bench.add_argument("--n", type=int, default=5000)
    bench.add_argument("--gamma", type=float, default=None)
    bench.add_argument("--mu", type=float, default=1.0)
    bench.add_argument("--sigma2", type=float, default=0.3)
    bench.add_argument("--d", type=int, default=2)
    bench.add_argument("--trials", type=int, default=5)
    bench.add_argument("--mc-budget", type=int, default=None)
    _add_common(bench)

    smp = sub.add_parser("sample", help="dump a synthetic labelled CSV")
    _add_model(smp)
    smp.add_argument("--n", type=int, required=True)
    _add_common(smp)
    return parser


def _load_settings(args: argparse.Namespace) -> tuple[dict[str, Any], dict[str, Any]]:
    """(resolved settings, raw config); flags win over config values."""
    if args.no_config:
        cfg = config_mod.default_config()
        cfg["logging"]["enabled"] = False
    else:
        cfg = config_mod.load_config(Path(args.config) if args.config else None)
    defaults = cfg.get("defaults", {})
    if not isinstance(defaults, dict):
        raise BadConfig("config 'defaults' must be an object")

    def pick(flag: Any, key: str) -> Any:
        return flag if flag is not None else defaults.get(key, config_mod.DEFAULT_CFG["defaults"][key])

    settings = {
        "seed": pick(args.seed, "seed"),
        "threads": pick(args.threads, "threads"),
        "mc_budget": pick(getattr(args, "mc_budget", None), "mc_budget"),
        "mst_method": pick(args.mst_method, "mst_method"),
    }
    settings["seed"] = check_seed(settings["seed"])
    for key in ("threads", "mc_budget"):
        if not isinstance(settings[key], int) or isinstance(settings[key], bool) or settings[key] < 1:
            raise BadConfig(f"{key} must be a positive integer, got {settings[key]!r}")
    if settings["mst_method"] not in MST_METHODS:
        raise BadConfig(f"mst_method must be one of {MST_METHODS}, got {settings['mst_method']!r}")
    return settings, cfg


def _model_from_args(args: argparse.Namespace) -> GaussianMixtureModel:
    if args.model:
        return io.read_model_file(args.model)
    if args.m is None:
        raise MalformedInput("give either --model FILE or circle parameters starting with --m")
    return circle_model(CircleConfig(args.m, args.mu, args.sigma2, args.d, args.gamma))


def _report_dicts(reports: Sequence[BoundReport], omit_timing: bool) -> list[dict[str, Any]]:
    out = [r.to_dict() for r in reports]
    if omit_timing:
        for item in out:
            item["runtime_ms"] = None
    return out


def cmd_estimate(args: argparse.Namespace, settings: dict[str, Any]) -> str:
    dataset = io.read_dataset_csv(args.input, n_classes=args.n_classes)
    priors = None
    if args.priors == "file":
        if not args.priors_file:
            raise MalformedInput("--priors file needs --priors-file PATH")
        priors = io.read_priors_file(args.priors_file)
    reports = estimate(
        dataset,
        args.method,
        priors,
        mst_method=settings["mst_method"],
        threads=settings["threads"],
        seed=settings["seed"],
    )
    payload = _report_dicts(reports, args.omit_timing)
    io.write_json(payload[0] if len(payload) == 1 else payload, args.output)
    return " ".join(
        f"{r.method.value}=[{r.lower:.6g}, {r.upper:.6g}]" for r in reports
    ) + f" m={dataset.m} n={dataset.n}"


def _matrix_payload(values: Any, std_errors: Any) -> dict[str, Any]:
    return {
        "values": [[float(x) for x in row] for row in values],
        "std_errors": None if std_errors is None else [[float(x) for x in row] for row in std_errors],
    }


def cmd_oracle(args: argparse.Namespace, settings: dict[str, Any]) -> str:
    model = _model_from_args(args)
    result = oracle_bounds(model, settings["mc_budget"], settings["seed"], settings["threads"])
    summary = result.summary
    try:
        closed_form: float | None = binary_ber_closed_form(model)
    except BoundsError:
        closed_form = None
    reports = [result.ghp, result.pw, result.js, result.pw_exact]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "model": io.model_to_dict(model),
        "seed": settings["seed"],
        "mc_budget": settings["mc_budget"],
        "ber": summary.ber.to_dict(),
        "ber_closed_form": closed_form,
        "cond_entropy_bits": summary.cond_entropy.to_dict(),
        "delta_generalized": _matrix_payload(summary.delta_m.values, summary.delta_m.std_errors),
        "delta_pairwise": _matrix_payload(summary.delta_pw.values, summary.delta_pw.std_errors),
        "pair_risk": _matrix_payload(summary.pair_risk, summary.pair_risk_se),
        "pair_mass": _matrix_payload(summary.pair_mass, None),
        "reports": _report_dicts(reports, args.omit_timing),
        "tightness": result.tightness.to_dict(),
        "runtime_ms": None if args.omit_timing else result.runtime_ms,
    }
    io.write_json(payload, args.output)
    return (
        f"ber={summary.ber.value:.6g}±{summary.ber.std_error:.2g} "
        f"ghp=[{result.ghp.lower:.6g}, {result.ghp.upper:.6g}] "
        f"orderings_hold={result.tightness.all_hold()}"
    )


def cmd_sweep(args: argparse.Namespace, settings: dict[str, Any]) -> str:
    cast = int if args.kind in ("m", "n-convergence") else float
    grid = parse_grid(args.grid, cast)
    dims = parse_grid(args.dims, int) if args.dims else None
    points = build_points(
        args.kind,
        grid,
        m=args.m if args.m is not None else 4,
        mu=args.mu,
        sigma2=args.sigma2,
        d=args.d,
        n=args.n,
        gamma=args.gamma,
        dims=dims,
    )
    frame = run_sweep(
        args.kind,
        points,
        trials=args.trials,
        seed=settings["seed"],
        mc_budget=settings["mc_budget"],
        threads=settings["threads"],
        mst_method=settings["mst_method"],
    )
    io.write_frame(frame, args.output)
    if args.mse_output:
        io.write_frame(mse_by_point(frame), args.mse_output)
    return f"kind={args.kind} points={len(points)} trials={args.trials} rows={len(frame)}"


def cmd_bench(args: argparse.Namespace, settings: dict[str, Any]) -> str:
    result = run_bench(
        m=args.m,
        n=args.n,
        gamma=args.gamma,
        trials=args.trials,
        seed=settings["seed"],
        mu=args.mu,
        sigma2=args.sigma2,
        d=args.d,
        mc_budget=settings["mc_budget"],
        mst_method=settings["mst_method"],
    )
    io.write_json(result, args.output)
    return (
        f"m={args.m} n={args.n} gamma={args.gamma} "
        f"ghp_median_ms={result['ghp_median_ms']:.1f} pw_median_ms={result['pw_median_ms']:.1f}"
    )


def cmd_sample(args: argparse.Namespace, settings: dict[str, Any]) -> str:
    model = _model_from_args(args)
    dataset = sample(model, args.n, settings["seed"])
    io.write_dataset_csv(dataset, args.output)
    return f"n={dataset.n} m={dataset.m} counts={dataset.class_counts.tolist()}"


COMMANDS = {
    "estimate": cmd_estimate,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "sample": cmd_sample,
}


def _fail(writer: LogWriter | None, channel: str, payload: dict[str, str], code: int) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    if writer is not None:
        writer.event(channel, "error", payload["message"], kind=payload["error"])
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    channel = args.command
    writer: LogWriter | None = None
    try:
        settings, cfg = _load_settings(args)
        writer = LogWriter.from_config(cfg)
        if writer is not None:
            writer.event(channel, "start", seed=settings["seed"], threads=settings["threads"])
        summary = COMMANDS[channel](args, settings)
        if writer is not None:
            writer.event(channel, "done", summary)
        return 0
    except BoundsError as exc:
        return _fail(writer, channel, exc.to_payload(), exc.exit_code)
    except OSError as exc:
        err = InputError(str(exc))
        return _fail(writer, channel, err.to_payload(), err.exit_code)
    except Exception as exc:
        return _fail(writer, channel, {"error": "InternalError", "message": repr(exc)}, 4)


if __name__ == "__main__":
    raise SystemExit(main())
