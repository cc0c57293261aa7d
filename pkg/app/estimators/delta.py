"""Plug-in estimates of the pairwise overlap quantities delta_ij and delta^m_ij.

Both estimators divide a dichotomous edge count by 2n. For the generalized
quantity the global count over n points converges to 2n delta^m_ij directly. For
the pairwise one, R_ij / (n_i + n_j) converges to 2 delta_ij / (p_i + p_j) by the
two-sample limit, and (n_i + n_j) / n converges to p_i + p_j, so R_ij / (2n)
again estimates delta_ij. Bound formulas can therefore take either matrix as is.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from ..core.errors import InvariantBreach, RangeError
from ..core.types import LabeledDataset
from ..geometry.emst import build_emst
from ..geometry.fr import FrKind, FrMatrix, count_dichotomous_global, count_dichotomous_pairwise


class DeltaKind(str, Enum):
    GENERALIZED = "Generalized"
    PAIRWISE_HP = "PairwiseHP"


class DeltaSource(str, Enum):
    EMPIRICAL = "Empirical"
    ORACLE = "Oracle"


@dataclass(frozen=True)
class DeltaMatrix:
    """Symmetric m x m matrix of delta estimates, zero diagonal, 0-indexed by class."""

    values: np.ndarray
    kind: DeltaKind
    source: DeltaSource
    std_errors: np.ndarray | None = None
    n: int | None = None
    # oracle only: sampled E[a_i + a_j] per pair, same sample as `values`
    pair_mass: np.ndarray | None = None

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise InvariantBreach(f"delta matrix must be square, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0.0):
            raise InvariantBreach("delta entries must be finite and nonnegative")
        if np.any(np.diag(vals) != 0.0) or not np.array_equal(vals, vals.T):
            raise InvariantBreach("delta matrix must be symmetric with a zero diagonal")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.std_errors is not None:
            se = np.array(self.std_errors, dtype=np.float64, copy=True)
            se.setflags(write=False)
            object.__setattr__(self, "std_errors", se)
        if self.pair_mass is not None:
            mass = np.array(self.pair_mass, dtype=np.float64, copy=True)
            if mass.shape != vals.shape:
                raise InvariantBreach(f"pair mass shape {mass.shape} does not match {vals.shape}")
            mass.setflags(write=False)
            object.__setattr__(self, "pair_mass", mass)

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    def pair_sum(self) -> float:
        return float(np.triu(self.values, 1).sum())

    def entry(self, i: int, j: int) -> float:
        """Value for classes i, j given 1-based."""
        return float(self.values[i - 1, j - 1])

    def as_rows(self) -> tuple[tuple[float, ...], ...]:
        return tuple(tuple(float(x) for x in row) for row in self.values)


def delta_from_counts(fr: FrMatrix) -> DeltaMatrix:
    if fr.n_total < 1:
        raise RangeError("dichotomous counts over an empty sample")
    kind = DeltaKind.GENERALIZED if fr.kind == FrKind.GLOBAL else DeltaKind.PAIRWISE_HP
    return DeltaMatrix(
        values=fr.counts / (2.0 * fr.n_total),
        kind=kind,
        source=DeltaSource.EMPIRICAL,
        n=fr.n_total,
    )


def delta_generalized(
    dataset: LabeledDataset, method: str = "auto", threads: int = 1
) -> DeltaMatrix:
    emst = build_emst(dataset.points, method=method, threads=threads)
    return delta_from_counts(count_dichotomous_global(emst, dataset.labels, dataset.m))


def delta_pairwise(dataset: LabeledDataset, method: str = "auto", threads: int = 1) -> DeltaMatrix:
    return delta_from_counts(count_dichotomous_pairwise(dataset, method=method, threads=threads))


def u_statistic(
    delta_ij: float, p_i: float, p_j: float, mass: float | None = None
) -> tuple[float, bool]:
    """u = 1 - 4 delta_ij / (p_i + p_j), clamped into [0, 1].

    `mass` replaces p_i + p_j when the pair mass was measured on the same
    sample as delta_ij. Returns (u, clamped).
    """
    total = float(mass) if mass is not None else float(p_i) + float(p_j)
    if total <= 0.0:
        raise RangeError(f"p_i + p_j must be positive, got {total}")
    if delta_ij < 0.0:
        raise RangeError(f"delta must be nonnegative, got {delta_ij}")
    u = 1.0 - 4.0 * float(delta_ij) / total
    if u < 0.0:
        return 0.0, True
    if u > 1.0:
        return 1.0, True
    return u, False


def inequality_violations(
    delta_m: DeltaMatrix, delta_pw: DeltaMatrix, slack: float = 0.0
) -> list[tuple[int, int, float]]:
    """Pairs (i, j, excess), 1-based, where delta^m_ij > delta_ij + slack.

    The population satisfies delta_ij >= delta^m_ij; finite samples may not.
    """
    if delta_m.m != delta_pw.m:
        raise RangeError(f"matrix sizes differ: {delta_m.m} vs {delta_pw.m}")
    out: list[tuple[int, int, float]] = []
    for i, j in combinations(range(delta_m.m), 2):
        excess = float(delta_m.values[i, j] - delta_pw.values[i, j])
        if excess > slack:
            out.append((i + 1, j + 1, excess))
    return out
