"""Exact Euclidean minimum spanning trees.

Edges are ordered by the key (squared length, min endpoint, max endpoint). Under
that strict total order the MST is unique, so every construction path below
returns the same edge set, duplicates and equal distances included. Squared
lengths are summed one coordinate at a time in a fixed order so that both paths
see bit-identical keys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..core.errors import (
    DegenerateInput,
    DimensionMismatch,
    InvariantBreach,
    NonFiniteFeature,
    RangeError,
)

PRIM_MAX_N = 2048
KNN_START_K = 8
# rows x neighbours held in memory per KD-tree query chunk
KNN_CHUNK_CELLS = 4_000_000
# slack between our squared distances and the KD tree's own rounding
_TREE_SLACK = 1e-9

MST_METHODS = ("auto", "prim", "knn")


@dataclass(frozen=True)
class EdgeList:
    """MST over `n` points; edge k joins u[k] < v[k] with Euclidean length w[k].

    Edges are stored in key order (squared length, u, v).
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    n: int

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.w))

    def degrees(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.u, self.v]), minlength=self.n)

    def __len__(self) -> int:
        return int(self.u.size)


def _sq_norm(diff: np.ndarray) -> np.ndarray:
    acc = diff[..., 0] * diff[..., 0]
    for j in range(1, diff.shape[-1]):
        acc = acc + diff[..., j] * diff[..., j]
    return acc


def _check_points(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise DimensionMismatch(f"points must be an n x d matrix, got shape {pts.shape}")
    if pts.shape[0] < 2:
        raise DegenerateInput(f"an MST needs at least 2 points, got {pts.shape[0]}")
    if not np.all(np.isfinite(pts)):
        raise NonFiniteFeature("cannot build an MST over non-finite coordinates")
    return pts


def _edge_list(n: int, a: np.ndarray, b: np.ndarray, w2: np.ndarray) -> EdgeList:
    lo = np.minimum(a, b).astype(np.int64)
    hi = np.maximum(a, b).astype(np.int64)
    order = np.lexsort((hi, lo, w2))
    u, v = lo[order], hi[order]
    w = np.sqrt(w2[order])
    for arr in (u, v, w):
        arr.setflags(write=False)
    return EdgeList(u=u, v=v, w=w, n=n)


def _prim(pts: np.ndarray) -> EdgeList:
    n = pts.shape[0]
    # Vertices outside the tree live in the first `k` slots; removal swaps with the last.
    rest = np.arange(1, n, dtype=np.int64)
    rpts = pts[1:].copy()
    rd2 = _sq_norm(rpts - pts[0])
    rsrc = np.zeros(n - 1, dtype=np.int64)

    ea = np.empty(n - 1, dtype=np.int64)
    eb = np.empty(n - 1, dtype=np.int64)
    ew2 = np.empty(n - 1, dtype=np.float64)

    k = n - 1
    for step in range(n - 1):
        d2 = rd2[:k]
        dmin = d2.min()
        ties = np.flatnonzero(d2 == dmin)
        if ties.size == 1:
            pos = int(ties[0])
        else:
            lo = np.minimum(rsrc[ties], rest[ties])
            hi = np.maximum(rsrc[ties], rest[ties])
            pos = int(ties[np.lexsort((hi, lo))[0]])
        t = int(rest[pos])
        ea[step], eb[step], ew2[step] = rsrc[pos], t, dmin

        last = k - 1
        rest[pos], rpts[pos], rd2[pos], rsrc[pos] = rest[last], rpts[last], rd2[last], rsrc[last]
        k = last
        if k == 0:
            break

        nd2 = _sq_norm(rpts[:k] - pts[t])
        cur = rd2[:k]
        better = nd2 < cur
        eq = np.flatnonzero(nd2 == cur)
        if eq.size:
            r = rest[eq]
            lo_new, hi_new = np.minimum(r, t), np.maximum(r, t)
            lo_old, hi_old = np.minimum(r, rsrc[eq]), np.maximum(r, rsrc[eq])
            better[eq] = (lo_new < lo_old) | ((lo_new == lo_old) & (hi_new < hi_old))
        idx = np.flatnonzero(better)
        rd2[idx] = nd2[idx]
        rsrc[idx] = t

    return _edge_list(n, ea, eb, ew2)


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return int(root)

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def labels(self) -> np.ndarray:
        parent = self.parent
        # pointer jumping until every vertex points at its root
        while True:
            nxt = parent[parent]
            if np.array_equal(nxt, parent):
                return parent.copy()
            parent[:] = nxt


def _merge_best(
    comp_ids: np.ndarray,
    d2: np.ndarray,
    pair: np.ndarray,
    best_d2: np.ndarray,
    best_pair: np.ndarray,
) -> None:
    """Fold candidate edges into the per-component best (d2, pair-key) table."""
    if comp_ids.size == 0:
        return
    uniq = np.unique(comp_ids)
    all_c = np.concatenate([comp_ids, uniq])
    all_d2 = np.concatenate([d2, best_d2[uniq]])
    all_pair = np.concatenate([pair, best_pair[uniq]])
    order = np.lexsort((all_pair, all_d2, all_c))
    sc = all_c[order]
    first = np.ones(sc.size, dtype=bool)
    first[1:] = sc[1:] != sc[:-1]
    winners = order[first]
    best_d2[all_c[winners]] = all_d2[winners]
    best_pair[all_c[winners]] = all_pair[winners]


def _boruvka_knn(pts: np.ndarray, threads: int = 1) -> EdgeList:
    n = pts.shape[0]
    tree = cKDTree(pts)
    uf = _UnionFind(n)
    no_pair = np.iinfo(np.int64).max

    ea: list[int] = []
    eb: list[int] = []
    ew2: list[float] = []

    while len(ea) < n - 1:
        comp = uf.labels()
        best_d2 = np.full(n, np.inf)
        best_pair = np.full(n, no_pair, dtype=np.int64)

        pending = np.arange(n, dtype=np.int64)
        k = min(KNN_START_K, n - 1)
        while pending.size:
            kq = min(k, n - 1)
            everything = kq >= n - 1
            chunk = max(1, KNN_CHUNK_CELLS // (kq + 1))
            unresolved: list[np.ndarray] = []
            for start in range(0, pending.size, chunk):
                rows = pending[start : start + chunk]
                dist, idx = tree.query(pts[rows], k=kq + 1, workers=threads)
                idx = np.asarray(idx, dtype=np.int64).reshape(rows.size, -1)
                dist = np.asarray(dist, dtype=np.float64).reshape(rows.size, -1)
                d2 = _sq_norm(pts[idx] - pts[rows][:, None, :])
                foreign = comp[idx] != comp[rows][:, None]
                has = foreign.any(axis=1)

                masked = np.where(foreign, d2, np.inf)
                rowmin = masked.min(axis=1)
                lo = np.minimum(rows[:, None], idx)
                hi = np.maximum(rows[:, None], idx)
                tie = foreign & (masked == rowmin[:, None])
                pair = np.where(tie, lo * n + hi, no_pair)
                col = pair.argmin(axis=1)
                cand_pair = pair[np.arange(rows.size), col]

                sel = np.flatnonzero(has)
                _merge_best(comp[rows[sel]], rowmin[sel], cand_pair[sel], best_d2, best_pair)

                if everything:
                    continue
                # any point not returned is at least this far away
                bound = np.minimum(d2.max(axis=1), dist[:, -1] ** 2) * (1.0 - _TREE_SLACK)
                settled = (has & (rowmin < bound)) | (bound > best_d2[comp[rows]])
                unresolved.append(rows[~settled])
            pending = np.concatenate(unresolved) if unresolved else pending[:0]
            k *= 2

        roots = np.unique(comp)
        picks = np.unique(best_pair[roots])
        if picks.size and picks[-1] == no_pair:
            raise InvariantBreach("Boruvka round found a component without an outgoing edge")
        for key in picks.tolist():
            a, b = divmod(int(key), n)
            if uf.union(a, b):
                ea.append(a)
                eb.append(b)
                ew2.append(float(_sq_norm((pts[b] - pts[a])[None, :])[0]))

    return _edge_list(n, np.asarray(ea), np.asarray(eb), np.asarray(ew2))


def build_emst(points: np.ndarray, method: str = "auto", threads: int = 1) -> EdgeList:
    """Exact Euclidean MST of the rows of `points`.

    `prim` is the dense O(n^2) reference; `knn` runs Boruvka rounds whose
    nearest foreign neighbours come from a KD tree, growing k until each answer
    is certified. `auto` picks `prim` up to PRIM_MAX_N points.
    """
    if method not in MST_METHODS:
        raise RangeError(f"unknown MST method {method!r}; expected one of {MST_METHODS}")
    pts = _check_points(points)
    n = pts.shape[0]
    if method == "prim" or (method == "auto" and n <= PRIM_MAX_N):
        return _prim(pts)
    return _boruvka_knn(pts, threads=max(1, int(threads)))
