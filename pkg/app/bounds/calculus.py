"""Closed-form bounds on the multi-class Bayes error.

GHP bounds take the generalized overlap sum S = sum_{i<j} delta^m_ij:

    upper = 2 S
    lower = ((m-1)/m) * (1 - sqrt(1 - 2 (m/(m-1)) S))

The pairwise (PW) bounds combine two-class Henze-Penrose bounds through the
per-pair statistic u_ij, and the JS bounds take the conditional entropy
H(p) - JS in bits. Entropies are base 2 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np

from ..core.errors import DimensionMismatch, InvariantBreach, PriorMismatch, RangeError, WrongKind
from ..core.types import BoundMethod, BoundReport, Priors
from ..estimators.delta import DeltaKind, DeltaMatrix, DeltaSource, u_statistic

# Oracle radicands in [-ORACLE_RADICAND_TOL, 0) are Monte Carlo noise; below that is a bug.
ORACLE_RADICAND_TOL = 1e-3
# Rounding slack for the lower <= upper postcondition.
ORDER_TOL = 1e-12
ENTROPY_TOL = 1e-9


def ghp_upper(sum_delta: float) -> float:
    return 2.0 * sum_delta


def ghp_radicand(sum_delta: float, m: int) -> float:
    return 1.0 - 2.0 * (m / (m - 1.0)) * sum_delta


def ghp_lower(sum_delta: float, m: int) -> float:
    """Closed form with the radicand floored at zero."""
    return ((m - 1.0) / m) * (1.0 - math.sqrt(max(ghp_radicand(sum_delta, m), 0.0)))


def simplex_radicand(a: np.ndarray) -> np.ndarray:
    """GHP radicand at posterior vectors a (rows on the simplex).

    Same value as 1 - 2 (m/(m-1)) * (1 - sum a_k^2)/2, written as
    (m/(m-1)) sum (a_k - 1/m)^2 so it stays accurate next to zero.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    m = a.shape[1]
    if m < 2:
        raise RangeError(f"simplex radicand needs m >= 2, got {m}")
    centred = a - 1.0 / m
    return (m / (m - 1.0)) * np.einsum("nk,nk->n", centred, centred)


def simplex_ghp_lower(a: np.ndarray) -> np.ndarray:
    """Pointwise GHP lower bound ((m-1)/m)(1 - sqrt(radicand)) for each row of a."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    m = a.shape[1]
    return ((m - 1.0) / m) * (1.0 - np.sqrt(simplex_radicand(a)))


def _source_tag(source: DeltaSource) -> str:
    return "oracle" if source == DeltaSource.ORACLE else "empirical"


def _clamp_radicand(value: float, source: DeltaSource, what: str) -> tuple[float, bool]:
    if value >= 0.0:
        return value, False
    if source == DeltaSource.ORACLE and value < -ORACLE_RADICAND_TOL:
        raise InvariantBreach(f"{what}: oracle radicand {value:.6g} below -{ORACLE_RADICAND_TOL}")
    return 0.0, True


def _ordered(method: BoundMethod, lower: float, upper: float) -> float:
    if lower > upper + ORDER_TOL:
        raise InvariantBreach(f"{method.value}: lower bound {lower} exceeds upper bound {upper}")
    return min(lower, upper)


@dataclass(frozen=True)
class GhpInputs:
    delta_m: DeltaMatrix
    m: int
    sum_delta: float
    radicand: float

    @classmethod
    def from_delta(cls, delta_m: DeltaMatrix, m: int | None = None) -> GhpInputs:
        if delta_m.kind != DeltaKind.GENERALIZED:
            raise WrongKind(f"GHP bounds need a Generalized delta matrix, got {delta_m.kind.value}")
        if m is not None and m != delta_m.m:
            raise DimensionMismatch(f"m={m} but the delta matrix is {delta_m.m}x{delta_m.m}")
        s = delta_m.pair_sum()
        r = ghp_radicand(s, delta_m.m) if delta_m.m > 1 else 1.0
        return cls(delta_m=delta_m, m=delta_m.m, sum_delta=s, radicand=r)


@dataclass(frozen=True)
class JsOracleInputs:
    cond_entropy: float
    m: int

    def __post_init__(self) -> None:
        if self.m < 2:
            raise RangeError(f"JS bounds need m >= 2, got {self.m}")
        h = float(self.cond_entropy)
        if not math.isfinite(h) or h < -ENTROPY_TOL or h > math.log2(self.m) + ENTROPY_TOL:
            raise RangeError(f"conditional entropy {h} outside [0, log2({self.m})]")
        object.__setattr__(self, "cond_entropy", min(max(h, 0.0), math.log2(self.m)))


def ghp_bounds(
    delta_m: DeltaMatrix,
    m: int | None = None,
    *,
    priors: Priors | None = None,
    seed: int | None = None,
    runtime_ms: float | None = None,
) -> BoundReport:
    inputs = GhpInputs.from_delta(delta_m, m)
    clamped = False
    upper = ghp_upper(inputs.sum_delta)
    if upper > 1.0:
        upper, clamped = 1.0, True
    if inputs.m == 1:
        lower = 0.0
    else:
        r, r_clamped = _clamp_radicand(inputs.radicand, delta_m.source, "GHP")
        clamped = clamped or r_clamped
        lower = ((inputs.m - 1.0) / inputs.m) * (1.0 - math.sqrt(min(r, 1.0)))
    lower = _ordered(BoundMethod.GHP, lower, upper)
    return BoundReport(
        method=BoundMethod.GHP,
        lower=lower,
        upper=upper,
        m=inputs.m,
        n=delta_m.n,
        priors_used=priors.as_tuple() if priors is not None else (),
        clamped=clamped,
        seed=seed,
        runtime_ms=runtime_ms,
        source=_source_tag(delta_m.source),
        delta_matrix=delta_m.as_rows(),
        extras={"sum_delta": inputs.sum_delta, "radicand": inputs.radicand},
    )


def pw_bounds(
    delta_pw: DeltaMatrix,
    priors: Priors,
    *,
    seed: int | None = None,
    runtime_ms: float | None = None,
) -> BoundReport:
    if delta_pw.kind != DeltaKind.PAIRWISE_HP:
        raise WrongKind(f"PW bounds need a PairwiseHP delta matrix, got {delta_pw.kind.value}")
    if priors.m != delta_pw.m:
        raise PriorMismatch(f"{priors.m} priors for a {delta_pw.m}-class delta matrix")
    m = delta_pw.m
    p = priors.p
    clamped = False
    acc = 0.0
    # oracle matrices carry the sampled pair mass E[a_i + a_j]; u is formed on it
    mass = delta_pw.pair_mass
    for i, j in combinations(range(m), 2):
        s = float(p[i] + p[j])
        u_mass = float(mass[i, j]) if mass is not None and mass[i, j] > 0.0 else s
        d_ij = float(delta_pw.values[i, j])
        raw_u = 1.0 - 4.0 * d_ij / u_mass
        _clamp_radicand(raw_u, delta_pw.source, f"PW pair ({i + 1}, {j + 1})")
        u, u_clamped = u_statistic(d_ij, float(p[i]), float(p[j]), mass=u_mass)
        clamped = clamped or u_clamped
        acc += s * (0.5 - 0.5 * math.sqrt(u))
    upper = 2.0 * delta_pw.pair_sum()
    lower = _ordered(BoundMethod.PW, (2.0 / m) * acc, upper)
    return BoundReport(
        method=BoundMethod.PW,
        lower=lower,
        upper=upper,
        m=m,
        n=delta_pw.n,
        priors_used=priors.as_tuple(),
        clamped=clamped,
        seed=seed,
        runtime_ms=runtime_ms,
        source=_source_tag(delta_pw.source),
        upper_exceeds_one=upper > 1.0,
        delta_matrix=delta_pw.as_rows(),
        extras={"sum_delta": delta_pw.pair_sum()},
    )


def js_bounds(
    inputs: JsOracleInputs,
    *,
    priors: Priors | None = None,
    seed: int | None = None,
    runtime_ms: float | None = None,
) -> BoundReport:
    """upper = H/2, lower = H^2 / (4 (m-1)), H = H(p) - JS in bits.

    Equivalent to ((H/2)^2)/(m-1); the two normalisations agree.
    """
    h, m = inputs.cond_entropy, inputs.m
    upper = h / 2.0
    lower = _ordered(BoundMethod.JS, h * h / (4.0 * (m - 1)), upper)
    return BoundReport(
        method=BoundMethod.JS,
        lower=lower,
        upper=upper,
        m=m,
        n=None,
        priors_used=priors.as_tuple() if priors is not None else (),
        seed=seed,
        runtime_ms=runtime_ms,
        source="oracle",
        upper_exceeds_one=upper > 1.0,
        extras={"cond_entropy_bits": h},
    )


def pw_exact_bounds(
    risk_matrix: np.ndarray,
    priors: Priors,
    *,
    seed: int | None = None,
    runtime_ms: float | None = None,
) -> BoundReport:
    """Pairwise bound from the true two-class risks eps_ij.

    (2/m) sum (p_i+p_j) eps_ij <= BER <= sum (p_i+p_j) eps_ij
    """
    risks = np.asarray(risk_matrix, dtype=np.float64)
    m = priors.m
    if risks.shape != (m, m):
        raise PriorMismatch(f"risk matrix shape {risks.shape} does not match {m} priors")
    if not np.all(np.isfinite(risks)) or np.any(risks < 0.0) or np.any(risks > 0.5 + ORDER_TOL):
        raise RangeError("pairwise risks must lie in [0, 1/2]")
    p = priors.p
    total = sum(float(p[i] + p[j]) * float(risks[i, j]) for i, j in combinations(range(m), 2))
    upper = total
    lower = _ordered(BoundMethod.PW_EXACT, (2.0 / m) * total, upper)
    return BoundReport(
        method=BoundMethod.PW_EXACT,
        lower=lower,
        upper=upper,
        m=m,
        n=None,
        priors_used=priors.as_tuple(),
        seed=seed,
        runtime_ms=runtime_ms,
        source="oracle",
        upper_exceeds_one=upper > 1.0,
        delta_matrix=tuple(tuple(float(x) for x in row) for row in risks),
    )


@dataclass(frozen=True)
class TightnessReport:
    """Population orderings between the bound families, each allowed `tolerance` slack.

    JS comparisons are None for m < 3, where they are not claimed.
    """

    m: int
    tolerance: float
    asserted: bool
    ghp_upper_le_js_upper: bool | None
    ghp_upper_le_pw_upper: bool
    ghp_lower_ge_js_lower: bool | None
    ghp_lower_ge_pw_lower: bool
    ber: float | None = None
    gaps: dict[str, float] = field(default_factory=dict)
    upper_tightness_ratio: float | None = None

    def orderings(self) -> dict[str, bool | None]:
        return {
            "ghp_upper_le_js_upper": self.ghp_upper_le_js_upper,
            "ghp_upper_le_pw_upper": self.ghp_upper_le_pw_upper,
            "ghp_lower_ge_js_lower": self.ghp_lower_ge_js_lower,
            "ghp_lower_ge_pw_lower": self.ghp_lower_ge_pw_lower,
        }

    def all_hold(self) -> bool:
        return all(v for v in self.orderings().values() if v is not None)

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "tolerance": self.tolerance,
            "asserted": self.asserted,
            "orderings": self.orderings(),
            "all_hold": self.all_hold(),
            "ber": self.ber,
            "gaps": dict(self.gaps),
            "upper_tightness_ratio": self.upper_tightness_ratio,
        }


def tightness_report(
    ghp: BoundReport,
    pw: BoundReport,
    js: BoundReport,
    tolerance: float = 0.0,
    ber: float | None = None,
) -> TightnessReport:
    """Compare GHP against PW and JS.

    Orderings are population statements, so `asserted` is True only when all
    three reports come from the oracle; otherwise the booleans are informational.
    """
    if not (ghp.m == pw.m == js.m):
        raise DimensionMismatch(f"reports disagree on m: {ghp.m}, {pw.m}, {js.m}")
    m = ghp.m
    tol = float(tolerance)
    with_js = m >= 3
    gaps: dict[str, float] = {}
    ratio: float | None = None
    if ber is not None:
        for rep, tag in ((ghp, "ghp"), (pw, "pw"), (js, "js")):
            gaps[f"{tag}_upper_gap"] = rep.upper - ber
            gaps[f"{tag}_lower_gap"] = ber - rep.lower
        pw_gap = pw.upper - ber
        if pw_gap > 0.0:
            ratio = (ghp.upper - ber) / pw_gap
    return TightnessReport(
        m=m,
        tolerance=tol,
        asserted=all(r.source == "oracle" for r in (ghp, pw, js)),
        ghp_upper_le_js_upper=(ghp.upper <= js.upper + tol) if with_js else None,
        ghp_upper_le_pw_upper=ghp.upper <= pw.upper + tol,
        ghp_lower_ge_js_lower=(ghp.lower + tol >= js.lower) if with_js else None,
        ghp_lower_ge_pw_lower=ghp.lower + tol >= pw.lower,
        ber=ber,
        gaps=gaps,
        upper_tightness_ratio=ratio,
    )
