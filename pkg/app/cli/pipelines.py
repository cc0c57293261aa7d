"""Estimator and oracle pipelines shared by the subcommands."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

from ..bounds.calculus import (
    JsOracleInputs,
    TightnessReport,
    ghp_bounds,
    js_bounds,
    pw_bounds,
    pw_exact_bounds,
    tightness_report,
)
from ..core.errors import PriorMismatch
from ..core.types import BoundReport, LabeledDataset, Priors, empirical_priors
from ..estimators.delta import DeltaMatrix, delta_generalized, delta_pairwise, inequality_violations
from ..oracle.gaussian import GaussianMixtureModel, McSummary, mc_summary


def _ms_since(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def _clamp_warnings(report: BoundReport) -> tuple[str, ...]:
    if not report.clamped:
        return report.warnings
    return report.warnings + (f"{report.method.value}: an intermediate was clamped into range",)


def run_ghp(
    dataset: LabeledDataset,
    *,
    mst_method: str = "auto",
    threads: int = 1,
    seed: int | None = None,
) -> tuple[BoundReport, DeltaMatrix]:
    """Global-MST pipeline: one MST, dichotomous counts, GHP bounds."""
    start = time.perf_counter()
    priors = empirical_priors(dataset)
    delta = delta_generalized(dataset, method=mst_method, threads=threads)
    report = ghp_bounds(delta, priors=priors, seed=seed)
    report = dataclasses.replace(report, runtime_ms=_ms_since(start))
    return dataclasses.replace(report, warnings=_clamp_warnings(report)), delta


def run_pw(
    dataset: LabeledDataset,
    priors: Priors | None = None,
    *,
    mst_method: str = "auto",
    threads: int = 1,
    seed: int | None = None,
) -> tuple[BoundReport, DeltaMatrix]:
    """Pairwise pipeline: m(m-1)/2 MSTs, one per class pair, then PW bounds."""
    start = time.perf_counter()
    used = priors if priors is not None else empirical_priors(dataset)
    if used.m != dataset.m:
        raise PriorMismatch(f"{used.m} priors supplied for {dataset.m} classes")
    delta = delta_pairwise(dataset, method=mst_method, threads=threads)
    report = pw_bounds(delta, used, seed=seed)
    report = dataclasses.replace(report, runtime_ms=_ms_since(start))
    return dataclasses.replace(report, warnings=_clamp_warnings(report)), delta


def _note_unused_priors(report: BoundReport, priors: Priors, m: int) -> BoundReport:
    """GHP bounds never read priors; keep the supplied ones visible in the report."""
    if priors.m != m:
        raise PriorMismatch(f"{priors.m} priors supplied for {m} classes")
    return dataclasses.replace(
        report,
        warnings=report.warnings
        + ("GHP: bounds do not depend on priors; supplied priors kept in extras.priors_supplied",),
        extras={**report.extras, "priors_supplied": [float(x) for x in priors.p]},
    )


def estimate(
    dataset: LabeledDataset,
    method: str,
    priors: Priors | None = None,
    *,
    mst_method: str = "auto",
    threads: int = 1,
    seed: int | None = None,
) -> list[BoundReport]:
    reports: list[BoundReport] = []
    deltas: list[DeltaMatrix] = []
    if method in ("ghp", "both"):
        rep, delta = run_ghp(dataset, mst_method=mst_method, threads=threads, seed=seed)
        if priors is not None:
            rep = _note_unused_priors(rep, priors, dataset.m)
        reports.append(rep)
        deltas.append(delta)
    if method in ("pw", "both"):
        rep, delta = run_pw(dataset, priors, mst_method=mst_method, threads=threads, seed=seed)
        reports.append(rep)
        deltas.append(delta)
    if len(deltas) == 2:
        # finite samples may break delta_ij >= delta^m_ij; report, never correct
        notes = tuple(
            f"generalized estimate exceeds pairwise for classes ({i}, {j}) by {excess:.6g}"
            for i, j, excess in inequality_violations(deltas[0], deltas[1])
        )
        if notes:
            reports = [dataclasses.replace(r, warnings=r.warnings + notes) for r in reports]
    labels = [v if isinstance(v, (int, float, str)) else str(v) for v in dataset.label_map]
    return [dataclasses.replace(r, extras={**r.extras, "label_map": labels}) for r in reports]


@dataclass(frozen=True)
class OracleResult:
    summary: McSummary
    ghp: BoundReport
    pw: BoundReport
    js: BoundReport
    pw_exact: BoundReport
    tightness: TightnessReport
    runtime_ms: float


def oracle_bounds(
    model: GaussianMixtureModel, mc_budget: int, seed: int, threads: int = 1
) -> OracleResult:
    """All bounds from one shared Monte Carlo pass, plus the ordering checks."""
    start = time.perf_counter()
    summary = mc_summary(model, mc_budget, seed, threads)
    priors = model.priors
    ghp = ghp_bounds(summary.delta_m, priors=priors, seed=seed)
    pw = pw_bounds(summary.delta_pw, priors, seed=seed)
    js = js_bounds(JsOracleInputs(summary.cond_entropy.value, model.m), priors=priors, seed=seed)
    exact = pw_exact_bounds(summary.pair_risk, priors, seed=seed)
    tight = tightness_report(
        ghp, pw, js, tolerance=summary.ordering_tolerance(), ber=summary.ber.value
    )
    return OracleResult(
        summary=summary,
        ghp=dataclasses.replace(ghp, warnings=_clamp_warnings(ghp)),
        pw=dataclasses.replace(pw, warnings=_clamp_warnings(pw)),
        js=js,
        pw_exact=exact,
        tightness=tight,
        runtime_ms=_ms_since(start),
    )
