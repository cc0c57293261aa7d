"""Friedman-Rafsky dichotomous edge counts over Euclidean MSTs."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from ..core.errors import EmptyClass, InvariantBreach, LengthMismatch, RangeError
from ..core.types import LabeledDataset
from .emst import EdgeList, build_emst


class FrKind(str, Enum):
    GLOBAL = "Global"
    PAIRWISE = "Pairwise"


@dataclass(frozen=True)
class FrMatrix:
    """Symmetric m x m dichotomous edge counts, zero diagonal, 0-indexed by class."""

    counts: np.ndarray
    kind: FrKind
    n_total: int
    class_counts: tuple[int, ...]

    @property
    def m(self) -> int:
        return int(self.counts.shape[0])

    def total(self) -> int:
        """Sum over unordered pairs i < j."""
        return int(np.triu(self.counts, 1).sum())

    def pair(self, i: int, j: int) -> int:
        """Count for classes i, j given 1-based."""
        return int(self.counts[i - 1, j - 1])


def _fr_matrix(counts: np.ndarray, kind: FrKind, n: int, class_counts) -> FrMatrix:
    counts = counts.astype(np.int64)
    counts.setflags(write=False)
    return FrMatrix(counts, kind, int(n), tuple(int(c) for c in class_counts))


def count_dichotomous_global(emst: EdgeList, labels, m: int | None = None) -> FrMatrix:
    """counts[i][j] = number of MST edges joining a class-(i+1) and a class-(j+1) point."""
    labs = np.asarray(labels, dtype=np.int64).ravel()
    if labs.size != emst.n:
        raise LengthMismatch(f"{labs.size} labels for an MST over {emst.n} points")
    if labs.size and labs.min() < 1:
        raise RangeError("labels must be 1-based")
    m = int(labs.max()) if m is None else int(m)
    if labs.max() > m:
        raise RangeError(f"labels must lie in 1..{m}")

    lu, lv = labs[emst.u] - 1, labs[emst.v] - 1
    cross = lu != lv
    counts = np.zeros((m, m), dtype=np.int64)
    np.add.at(counts, (lu[cross], lv[cross]), 1)
    counts = counts + counts.T

    fr = _fr_matrix(counts, FrKind.GLOBAL, labs.size, np.bincount(labs, minlength=m + 1)[1:])
    if fr.total() > max(emst.n - 1, 0):
        raise InvariantBreach(f"{fr.total()} dichotomous edges in a tree of {emst.n - 1} edges")
    return fr


def _pair_count(dataset: LabeledDataset, i: int, j: int, method: str) -> int:
    pts, labs = dataset.subset((i, j))
    emst = build_emst(pts, method=method)
    return int(np.count_nonzero(labs[emst.u] != labs[emst.v]))


def count_dichotomous_pairwise(
    dataset: LabeledDataset, method: str = "auto", threads: int = 1
) -> FrMatrix:
    """One MST per class pair over X_i u X_j; m(m-1)/2 builds in total."""
    class_counts = dataset.class_counts
    if np.any(class_counts == 0):
        missing = [int(k) + 1 for k in np.flatnonzero(class_counts == 0)]
        raise EmptyClass(f"class(es) {missing} have no samples")

    pairs = list(combinations(range(1, dataset.m + 1), 2))
    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_pair_count, dataset, i, j, method) for i, j in pairs]
            values = [f.result() for f in futures]
    else:
        values = [_pair_count(dataset, i, j, method) for i, j in pairs]

    counts = np.zeros((dataset.m, dataset.m), dtype=np.int64)
    for (i, j), c in zip(pairs, values):
        if c > class_counts[i - 1] + class_counts[j - 1] - 1:
            raise InvariantBreach(f"pair ({i}, {j}) count {c} exceeds its tree size")
        counts[i - 1, j - 1] = counts[j - 1, i - 1] = c
    return _fr_matrix(counts, FrKind.PAIRWISE, dataset.n, class_counts)
