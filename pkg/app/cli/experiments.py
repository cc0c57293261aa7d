"""Parameter sweeps and runtime benchmarks over circle-of-Gaussians models.

Every grid point gets one oracle pass and `trials` seeded samples. Trial seeds
come from (seed, STREAM_SWEEP, grid index, trial), so a row depends only on its
own coordinates, not on the order or thread on which it was computed.
"""

from __future__ import annotations

import statistics
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
import pandas as pd

from ..bounds.calculus import ghp_bounds, pw_bounds
from ..core.errors import BadGrid, BoundsError
from ..core.rng import STREAM_BENCH, STREAM_SWEEP, derive_seed
from ..core.types import empirical_priors
from ..estimators.delta import delta_generalized, delta_pairwise
from ..oracle.gaussian import mc_ber
from ..synth.circle import CircleConfig, circle_model, sample
from .pipelines import OracleResult, oracle_bounds

SWEEP_KINDS = ("mu", "m", "n-convergence", "gamma")

SWEEP_COLUMNS = [
    "kind",
    "grid_value",
    "m",
    "mu",
    "sigma2",
    "d",
    "n",
    "gamma",
    "trial",
    "seed",
    "root_seed",
    "mc_budget",
    "mst_method",
    "emp_delta_sum",
    "emp_ghp_lower",
    "emp_ghp_upper",
    "emp_pw_lower",
    "emp_pw_upper",
    "oracle_ber",
    "oracle_ber_se",
    "oracle_delta_sum",
    "oracle_ghp_lower",
    "oracle_ghp_upper",
    "oracle_pw_lower",
    "oracle_pw_upper",
    "oracle_js_lower",
    "oracle_js_upper",
    "sq_err_delta_sum",
    "sq_err_ghp_upper",
    "sq_err_ghp_lower",
    "mse_delta_sum",
    "mse_ghp_upper",
    "mse_ghp_lower",
    "upper_tightness_ratio",
]


@dataclass(frozen=True)
class SweepPoint:
    grid_value: float
    config: CircleConfig
    n: int


def parse_grid(text: str | Sequence[float], cast: Callable[[Any], Any] = float) -> list[Any]:
    """Comma-separated grid; empty or non-numeric entries raise BadGrid."""
    items = text.split(",") if isinstance(text, str) else list(text)
    values: list[Any] = []
    for item in items:
        token = item.strip() if isinstance(item, str) else item
        if token == "":
            continue
        try:
            number = float(token)
        except (TypeError, ValueError) as exc:
            raise BadGrid(f"grid value {item!r} is not a number") from exc
        if not np.isfinite(number):
            raise BadGrid(f"grid value {item!r} is not finite")
        if cast is int and number != int(number):
            raise BadGrid(f"grid value {item!r} must be an integer")
        values.append(cast(number))
    if not values:
        raise BadGrid("grid must contain at least one value")
    return values


def build_points(
    kind: str,
    grid: Sequence[float],
    *,
    m: int,
    mu: float,
    sigma2: float,
    d: int,
    n: int,
    gamma: float | None,
    dims: Sequence[int] | None = None,
) -> list[SweepPoint]:
    if kind not in SWEEP_KINDS:
        raise BadGrid(f"unknown sweep kind {kind!r}; expected one of {SWEEP_KINDS}")
    points: list[SweepPoint] = []
    try:
        if kind == "mu":
            for v in grid:
                points.append(SweepPoint(v, CircleConfig(m, float(v), sigma2, d, gamma), n))
        elif kind == "m":
            for v in grid:
                if int(v) != v or v < 2:
                    raise BadGrid(f"class counts must be integers >= 2, got {v}")
                points.append(SweepPoint(v, CircleConfig(int(v), mu, sigma2, d, gamma), n))
        elif kind == "gamma":
            for v in grid:
                points.append(SweepPoint(v, CircleConfig(m, mu, sigma2, d, float(v)), n))
        else:
            for dim in dims or [d]:
                for v in grid:
                    if int(v) != v or v < 2:
                        raise BadGrid(f"sample sizes must be integers >= 2, got {v}")
                    points.append(SweepPoint(v, CircleConfig(m, mu, sigma2, int(dim), gamma), int(v)))
    except BadGrid:
        raise
    except BoundsError as exc:
        raise BadGrid(f"grid produces an invalid model: {exc.message}") from exc
    return points


def _trial_row(
    kind: str,
    point: SweepPoint,
    oracle: OracleResult,
    trial: int,
    seed: int,
    mst_method: str,
    root_seed: int,
) -> dict[str, Any]:
    cfg = point.config
    row: dict[str, Any] = {
        "kind": kind,
        "grid_value": point.grid_value,
        "m": cfg.m,
        "mu": cfg.mu,
        "sigma2": cfg.sigma2,
        "d": cfg.d,
        "n": point.n,
        "gamma": cfg.gamma,
        "trial": trial,
        "seed": seed,
        "root_seed": root_seed,
        "mc_budget": oracle.summary.n_samples,
        "mst_method": mst_method,
        "oracle_ber": oracle.summary.ber.value,
        "oracle_ber_se": oracle.summary.ber.std_error,
        "oracle_delta_sum": oracle.summary.delta_m.pair_sum(),
        "oracle_ghp_lower": oracle.ghp.lower,
        "oracle_ghp_upper": oracle.ghp.upper,
        "oracle_pw_lower": oracle.pw.lower,
        "oracle_pw_upper": oracle.pw.upper,
        "oracle_js_lower": oracle.js.lower,
        "oracle_js_upper": oracle.js.upper,
        "upper_tightness_ratio": oracle.tightness.upper_tightness_ratio,
    }
    dataset = sample(circle_model(cfg), point.n, seed)
    if dataset.has_empty_class():
        # too few draws to see every class; the row keeps its oracle columns
        for key in ("emp_delta_sum", "emp_ghp_lower", "emp_ghp_upper", "emp_pw_lower", "emp_pw_upper"):
            row[key] = float("nan")
    else:
        priors = empirical_priors(dataset)
        dm = delta_generalized(dataset, method=mst_method)
        ghp = ghp_bounds(dm, priors=priors)
        pw = pw_bounds(delta_pairwise(dataset, method=mst_method), priors)
        row.update(
            emp_delta_sum=dm.pair_sum(),
            emp_ghp_lower=ghp.lower,
            emp_ghp_upper=ghp.upper,
            emp_pw_lower=pw.lower,
            emp_pw_upper=pw.upper,
        )
    row["sq_err_delta_sum"] = (row["emp_delta_sum"] - row["oracle_delta_sum"]) ** 2
    row["sq_err_ghp_upper"] = (row["emp_ghp_upper"] - row["oracle_ghp_upper"]) ** 2
    row["sq_err_ghp_lower"] = (row["emp_ghp_lower"] - row["oracle_ghp_lower"]) ** 2
    return row


def _run_indexed(jobs: list[Callable[[], Any]], threads: int) -> list[Any]:
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(job) for job in jobs]
            return [f.result() for f in futures]
    return [job() for job in jobs]


def run_sweep(
    kind: str,
    points: Sequence[SweepPoint],
    *,
    trials: int,
    seed: int,
    mc_budget: int,
    threads: int = 1,
    mst_method: str = "auto",
) -> pd.DataFrame:
    if trials < 1:
        raise BadGrid(f"trials must be at least 1, got {trials}")
    oracles = [
        oracle_bounds(
            circle_model(p.config), mc_budget, derive_seed(seed, STREAM_SWEEP, g), threads
        )
        for g, p in enumerate(points)
    ]
    jobs: list[Callable[[], Any]] = []
    for g, point in enumerate(points):
        for t in range(trials):
            trial_seed = derive_seed(seed, STREAM_SWEEP, g, t + 1)
            jobs.append(
                lambda g=g, point=point, t=t, s=trial_seed: _trial_row(
                    kind, point, oracles[g], t, s, mst_method, seed
                )
            )
    rows = _run_indexed(jobs, threads)
    frame = pd.DataFrame(rows)
    frame["point"] = np.repeat(np.arange(len(points)), trials)
    grouped = frame.groupby("point", sort=False)
    frame["mse_delta_sum"] = grouped["sq_err_delta_sum"].transform("mean")
    frame["mse_ghp_upper"] = grouped["sq_err_ghp_upper"].transform("mean")
    frame["mse_ghp_lower"] = grouped["sq_err_ghp_lower"].transform("mean")
    return frame[SWEEP_COLUMNS]


def mse_by_point(frame: pd.DataFrame) -> pd.DataFrame:
    """One row per (d, grid value) with its MSE columns."""
    keys = ["d", "grid_value"]
    cols = ["mse_delta_sum", "mse_ghp_upper", "mse_ghp_lower"]
    return frame.groupby(keys, sort=False)[cols].first().reset_index()


def _timed(fn: Callable[[], Any]) -> tuple[float, Any]:
    start = time.perf_counter()
    out = fn()
    return (time.perf_counter() - start) * 1000.0, out


def run_bench(
    *,
    m: int,
    n: int,
    gamma: float | None,
    trials: int,
    seed: int,
    mu: float = 1.0,
    sigma2: float = 0.3,
    d: int = 2,
    mc_budget: int = 200_000,
    mst_method: str = "auto",
) -> dict[str, Any]:
    """Wall time of the global-MST pipeline against the pairwise one.

    Timed sections run single-threaded on identical inputs per trial.
    """
    if trials < 1:
        raise BadGrid(f"trials must be at least 1, got {trials}")
    config = CircleConfig(m, mu, sigma2, d, gamma)
    model = circle_model(config)
    ber = mc_ber(model, mc_budget, derive_seed(seed, STREAM_BENCH, 0)).value

    ghp_ms: list[float] = []
    pw_ms: list[float] = []
    ratios: list[float] = []
    for t in range(trials):
        dataset = sample(model, n, derive_seed(seed, STREAM_BENCH, t + 1))
        priors = empirical_priors(dataset)
        t_ghp, ghp = _timed(lambda: ghp_bounds(delta_generalized(dataset, mst_method), priors=priors))
        t_pw, pw = _timed(lambda: pw_bounds(delta_pairwise(dataset, mst_method), priors))
        ghp_ms.append(t_ghp)
        pw_ms.append(t_pw)
        if pw.upper - ber > 0.0:
            ratios.append((ghp.upper - ber) / (pw.upper - ber))

    med_ghp = statistics.median(ghp_ms)
    med_pw = statistics.median(pw_ms)
    return {
        "m": m,
        "n": n,
        "gamma": gamma,
        "mu": mu,
        "sigma2": sigma2,
        "d": d,
        "trials": trials,
        "seed": seed,
        "threads": 1,
        "mst_method": mst_method,
        "oracle_ber": ber,
        "ghp_times_ms": ghp_ms,
        "pw_times_ms": pw_ms,
        "ghp_median_ms": med_ghp,
        "pw_median_ms": med_pw,
        "median_difference_ms": med_pw - med_ghp,
        "median_ratio": med_pw / med_ghp if med_ghp > 0.0 else None,
        "tightness_ratio": statistics.median(ratios) if ratios else None,
    }
