"""Geometric and set-merging primitives shared by every other module.

All Euclidean distances in the package flow through the cdist kernel of
scipy so that any two code paths computing the distance of the same point
pair produce bitwise-identical float64 values.  Weights are always true
distances; squared-distance shortcuts are never stored.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist


class WeightedEdge(NamedTuple):
    u: int
    v: int
    w: float


@dataclass(frozen=True)
class PointSet:
    """n points in d-dimensional Euclidean space, immutable after construction."""

    coords: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coords, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError(f"coords must be 2-d (n, d), got shape {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("coordinates must be finite (no NaN/Inf)")
        a = a + 0.0  # normalize -0.0 so duplicate detection is value-based
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        object.__setattr__(self, "coords", a)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def cross_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full |a| x |b| Euclidean distance matrix."""
    return cdist(np.atleast_2d(a), np.atleast_2d(b))


def paired_distances(a: np.ndarray, b: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Row-wise distances between a[i] and b[i].

    Computed as diagonals of small cdist blocks so every value is
    bitwise-identical to the corresponding full-matrix entry.
    """
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    m = a.shape[0]
    out = np.empty(m)
    for s in range(0, m, chunk):
        e = min(s + chunk, m)
        out[s:e] = cdist(a[s:e], b[s:e]).diagonal()
    return out


def edge_distances(coords: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Distances for an edge list sorted by u.

    Consecutive edges sharing u are served by one cdist row, so each pair
    costs exactly one kernel entry (values identical to paired_distances).
    """
    m = len(u)
    out = np.empty(m)
    if m == 0:
        return out
    starts = np.flatnonzero(np.concatenate([[True], u[1:] != u[:-1]]))
    ends = np.append(starts[1:], m)
    for s, e in zip(starts, ends):
        uu = int(u[s])
        out[s:e] = cdist(coords[uu : uu + 1], coords[v[s:e]])[0]
    return out


def distance(points: PointSet, i: int, j: int) -> float:
    """Euclidean distance between points i and j."""
    n = points.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"point index out of range: ({i}, {j}) with n={n}")
    if i == j:
        return 0.0
    return float(cdist(points.coords[i : i + 1], points.coords[j : j + 1])[0, 0])


def dedupe(points: PointSet) -> tuple[PointSet, dict[int, list[int]]]:
    """Collapse exact duplicate points, keeping first-occurrence order.

    Returns the deduplicated set and a map from each surviving point's new
    index to the list of original indices it represents.
    """
    coords = points.coords
    _, first, inverse = np.unique(coords, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")  # first-occurrence order
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    new_of_old = rank[inverse.ravel()]
    groups: dict[int, list[int]] = {i: [] for i in range(len(order))}
    for orig, ni in enumerate(new_of_old):
        groups[int(ni)].append(orig)
    return PointSet(coords[first[order]]), groups


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path compression."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need n >= 1")
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)
        self.n_roots = n

    def find(self, x: int) -> int:
        p = self.parent
        if not 0 <= x < len(p):
            raise IndexError(f"element {x} out of range")
        x = int(x)
        while p[x] != x:
            p[x] = p[p[x]]
            x = int(p[x])
        return x

    def union(self, x: int, y: int) -> int:
        """Merge the sets of x and y; returns the surviving root."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        sx, sy = self.size[rx], self.size[ry]
        # larger set's root survives; equal sizes keep the smaller root id
        if sx < sy or (sx == sy and ry < rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] = sx + sy
        self.n_roots -= 1
        return int(rx)


def canonical_edges(u, v, w) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return edge arrays with u < v, sorted by (weight, min index, max index)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    order = np.lexsort((hi, lo, w))
    return lo[order], hi[order], w[order]
