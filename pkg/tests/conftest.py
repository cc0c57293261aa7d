from __future__ import annotations

import functools
import itertools
import json
from pathlib import Path

import numpy as np
import pytest


@functools.lru_cache(maxsize=None)
def _all_spanning_trees(n: int) -> np.ndarray:
    """Every labelled tree on n vertices (Cayley: n^(n-2) of them) as a T x (n-1) x 2 array."""
    if n == 2:
        return np.array([[[0, 1]]])
    trees = []
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = next(i for i in range(n) if degree[i] == 1)
            edges.append((min(leaf, x), max(leaf, x)))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(n) if degree[i] == 1]
        edges.append((u, v))
        trees.append(edges)
    return np.array(trees)


def _exhaustive_mst(points: np.ndarray) -> tuple[float, set[tuple[int, int]]]:
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
    trees = _all_spanning_trees(n)
    weights = dist[trees[:, :, 0], trees[:, :, 1]].sum(axis=1)
    best = int(np.argmin(weights))
    return float(weights[best]), {(int(a), int(b)) for a, b in trees[best]}


def _kruskal_mst(points: np.ndarray) -> set[tuple[int, int]]:
    """Reference MST: all pairs sorted by (squared length, i, j), union-find."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    cand = []
    for i in range(n):
        for j in range(i + 1, n):
            diff = pts[j] - pts[i]
            cand.append((float(np.dot(diff, diff)), i, j))
    cand.sort()
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = set()
    for _, i, j in cand:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.add((i, j))
    return edges


@pytest.fixture
def exhaustive_mst():
    return _exhaustive_mst


@pytest.fixture
def kruskal_mst():
    return _kruskal_mst


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def chain_csv(tmp_path):
    path = tmp_path / "chain.csv"
    path.write_text("x,label\n0,1\n1,2\n2,1\n3,2\n", encoding="utf-8")
    return path


REFERENCE_PATH = Path(__file__).parent / "fixtures" / "oracle_reference.json"


@pytest.fixture(scope="session")
def oracle_reference():
    return json.loads(REFERENCE_PATH.read_text(encoding="utf-8"))
