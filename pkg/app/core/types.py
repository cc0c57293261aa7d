from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    EmptyClass,
    InvariantBreach,
    NonFiniteFeature,
    RangeError,
)

PRIOR_SUM_TOL = 1e-12
SCHEMA_VERSION = 1


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabeledDataset:
    """n points in R^d with class labels 1..m.

    Construction checks shapes, finiteness and the label range only. Empty classes
    are allowed here (a tiny synthetic sample can miss a class); `validate_dataset`
    and the pairwise estimator reject them.
    """

    points: np.ndarray
    labels: np.ndarray
    m: int
    label_map: tuple[Any, ...] = ()

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        labs = np.asarray(self.labels)
        if pts.ndim != 2:
            raise DimensionMismatch(f"points must be an n x d matrix, got shape {pts.shape}")
        if labs.ndim != 1 or labs.shape[0] != pts.shape[0]:
            raise DimensionMismatch(
                f"labels must have length n={pts.shape[0]}, got shape {labs.shape}"
            )
        if pts.shape[1] < 1:
            raise DimensionMismatch("points need at least one feature column")
        if not np.all(np.isfinite(pts)):
            raise NonFiniteFeature("feature matrix contains NaN or infinite values")
        if self.m < 1:
            raise RangeError(f"class count must be positive, got {self.m}")
        labs = labs.astype(np.int64)
        if labs.size and (labs.min() < 1 or labs.max() > self.m):
            raise RangeError(f"labels must lie in 1..{self.m}")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "labels", _frozen(labs))
        object.__setattr__(self, "m", int(self.m))
        if not self.label_map:
            object.__setattr__(self, "label_map", tuple(range(1, self.m + 1)))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m + 1)[1:]

    def has_empty_class(self) -> bool:
        return bool(np.any(self.class_counts == 0))

    def class_points(self, k: int) -> np.ndarray:
        return self.points[self.labels == k]

    def subset(self, classes: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        """Points and labels of the given classes, original row order kept."""
        mask = np.isin(self.labels, np.asarray(classes))
        return self.points[mask], self.labels[mask]


@dataclass(frozen=True)
class Priors:
    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=np.float64).ravel()
        if p.size < 1:
            raise RangeError("priors must not be empty")
        if not np.all(np.isfinite(p)) or np.any(p <= 0.0) or np.any(p > 1.0):
            raise RangeError(f"every prior must lie in (0, 1], got {p.tolist()}")
        if abs(float(p.sum()) - 1.0) > PRIOR_SUM_TOL:
            raise RangeError(f"priors must sum to 1 (got {float(p.sum())!r})")
        object.__setattr__(self, "p", _frozen(p))

    @property
    def m(self) -> int:
        return int(self.p.size)

    def pair_weight(self, i: int, j: int) -> float:
        """p~_ij = p_i / (p_i + p_j), classes indexed 1..m."""
        pi, pj = float(self.p[i - 1]), float(self.p[j - 1])
        return pi / (pi + pj)

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(float(x) for x in self.p)


class BoundMethod(str, Enum):
    GHP = "GHP"
    PW = "PW"
    JS = "JS-oracle"
    PW_EXACT = "PW-exact"


@dataclass(frozen=True)
class BoundReport:
    method: BoundMethod
    lower: float
    upper: float
    m: int
    n: int | None
    priors_used: tuple[float, ...] = ()
    clamped: bool = False
    seed: int | None = None
    runtime_ms: float | None = None
    source: str = "empirical"
    upper_exceeds_one: bool = False
    warnings: tuple[str, ...] = ()
    delta_matrix: tuple[tuple[float, ...], ...] | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        lo, up = float(self.lower), float(self.upper)
        if not (np.isfinite(lo) and np.isfinite(up)):
            raise InvariantBreach(f"{self.method.value}: non-finite bound ({lo}, {up})")
        if lo < 0.0 or lo > up:
            raise InvariantBreach(f"{self.method.value}: expected 0 <= lower <= upper, got ({lo}, {up})")
        # Only the pairwise upper bound may legitimately exceed one.
        if up > 1.0 and not self.upper_exceeds_one:
            raise InvariantBreach(f"{self.method.value}: upper bound {up} exceeds 1")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "method": self.method.value,
            "m": self.m,
            "n": self.n,
            "priors": list(self.priors_used),
            "lower": self.lower,
            "upper": self.upper,
            "clamped": self.clamped,
            "delta_matrix": [list(row) for row in self.delta_matrix]
            if self.delta_matrix is not None
            else None,
            "runtime_ms": self.runtime_ms,
            "seed": self.seed,
            "warnings": list(self.warnings),
            "source": self.source,
            "upper_exceeds_one": self.upper_exceeds_one,
        }
        if self.extras:
            out["extras"] = dict(self.extras)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BoundReport:
        delta = data.get("delta_matrix")
        return cls(
            method=BoundMethod(data["method"]),
            lower=data["lower"],
            upper=data["upper"],
            m=data["m"],
            n=data.get("n"),
            priors_used=tuple(data.get("priors", ())),
            clamped=bool(data.get("clamped", False)),
            seed=data.get("seed"),
            runtime_ms=data.get("runtime_ms"),
            source=data.get("source", "empirical"),
            upper_exceeds_one=bool(data.get("upper_exceeds_one", False)),
            warnings=tuple(data.get("warnings", ())),
            delta_matrix=tuple(tuple(row) for row in delta) if delta is not None else None,
            extras=dict(data.get("extras", {})),
        )


def validate_dataset(
    raw_points: Any, raw_labels: Any, n_classes: int | None = None
) -> LabeledDataset:
    """Check raw arrays and re-index labels to contiguous 1..m.

    Labels are renumbered in order of first appearance; the original label of
    each class is kept in `label_map`. With `n_classes` declared, labels must
    already be 1..n_classes and every declared class must occur.
    """
    try:
        pts = np.asarray(raw_points, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"points are not a rectangular numeric matrix: {exc}") from exc
    labs = np.asarray(raw_labels)
    if pts.ndim == 1 and pts.size:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise DimensionMismatch(f"points must be an n x d matrix, got shape {pts.shape}")
    if labs.ndim != 1 or labs.shape[0] != pts.shape[0]:
        raise DimensionMismatch(f"expected {pts.shape[0]} labels, got shape {labs.shape}")
    if pts.shape[0] < 2:
        raise DegenerateInput(f"need at least 2 points, got {pts.shape[0]}")
    bad = ~np.isfinite(pts)
    if bad.any():
        row = int(np.argwhere(bad)[0][0])
        raise NonFiniteFeature(f"row {row} has a non-finite feature value")

    if n_classes is not None:
        if n_classes < 2:
            raise EmptyClass(f"need at least 2 classes, declared {n_classes}")
        try:
            declared = labs.astype(np.int64)
        except (TypeError, ValueError) as exc:
            raise RangeError("declared-class labels must be integers") from exc
        if np.any(declared != labs) or declared.min() < 1 or declared.max() > n_classes:
            raise RangeError(f"labels must lie in 1..{n_classes}")
        counts = np.bincount(declared, minlength=n_classes + 1)[1:]
        missing = [int(k) + 1 for k in np.flatnonzero(counts == 0)]
        if missing:
            raise EmptyClass(f"declared class(es) {missing} have no samples")
        return LabeledDataset(pts, declared, n_classes, tuple(range(1, n_classes + 1)))

    uniq, first_idx, inverse = np.unique(labs, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    relabeled = rank[inverse.ravel()] + 1
    if uniq.size < 2:
        raise EmptyClass(f"need samples from at least 2 classes, found {uniq.size}")
    return LabeledDataset(pts, relabeled, int(uniq.size), tuple(uniq[order].tolist()))


def empirical_priors(dataset: LabeledDataset) -> Priors:
    counts = dataset.class_counts
    if np.any(counts == 0):
        missing = [int(k) + 1 for k in np.flatnonzero(counts == 0)]
        raise EmptyClass(f"class(es) {missing} have no samples")
    return Priors(counts / float(dataset.n))
