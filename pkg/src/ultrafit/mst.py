"""Spanning trees: Kruskal over sparse graphs, an exact Euclidean MST
baseline, and certification of the approximate-Kruskal-tree factor."""

from dataclasses import dataclass, field

import numpy as np

from .core import (
    PointSet,
    UnionFind,
    WeightedEdge,
    canonical_edges,
    cross_distances,
    paired_distances,
)

_DENSE_KRUSKAL_LIMIT = 2048  # below this, exact MST materializes all pairs


class DisconnectedGraphError(ValueError):
    """Raised by kruskal when the edge list does not span all points."""

    def __init__(self, n, components, forest_u, forest_v, forest_w):
        self.n = n
        self.components = components
        self.forest_u = forest_u
        self.forest_v = forest_v
        self.forest_w = forest_w
        sizes = sorted((len(c) for c in components), reverse=True)
        preview = "; ".join(
            "{" + ",".join(map(str, sorted(c)[:8])) + (",..." if len(c) > 8 else "") + "}"
            for c in components[:6]
        )
        super().__init__(
            f"graph is disconnected: {len(components)} components of sizes {sizes[:10]}"
            f"{'...' if len(sizes) > 10 else ''}: {preview}"
        )


@dataclass
class SpanningTree:
    """Tree over n points: exactly n-1 edges, stored in canonical
    (weight, min index, max index) order."""

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    _adj: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.u) != self.n - 1:
            raise ValueError(f"tree over {self.n} points needs {self.n - 1} edges, got {len(self.u)}")

    def total_weight(self) -> float:
        return float(self.w.sum())

    def edge_list(self) -> list[WeightedEdge]:
        return [WeightedEdge(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def adjacency(self):
        """CSR-style (indptr, neighbor, edge_id) arrays for traversal."""
        if self._adj is None:
            deg = np.zeros(self.n, dtype=np.int64)
            np.add.at(deg, self.u, 1)
            np.add.at(deg, self.v, 1)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            nbr = np.empty(2 * (self.n - 1), dtype=np.int64)
            eid = np.empty(2 * (self.n - 1), dtype=np.int64)
            cur = indptr[:-1].copy()
            for i in range(len(self.u)):
                a, b = int(self.u[i]), int(self.v[i])
                nbr[cur[a]] = b
                eid[cur[a]] = i
                cur[a] += 1
                nbr[cur[b]] = a
                eid[cur[b]] = i
                cur[b] += 1
            object.__setattr__(self, "_adj", (indptr, nbr, eid))
        return self._adj


def _as_edge_arrays(edges):
    if isinstance(edges, tuple) and len(edges) == 3:
        u, v, w = edges
    else:
        u = np.array([e[0] for e in edges], dtype=np.int64)
        v = np.array([e[1] for e in edges], dtype=np.int64)
        w = np.array([e[2] for e in edges], dtype=np.float64)
    return np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64), np.asarray(w, dtype=np.float64)


def kruskal(n: int, edges) -> SpanningTree:
    """Minimum spanning tree of the given weighted graph.

    Edges may be a list of (u, v, w) tuples or a (u, v, w) array triple.
    Ties resolve by the canonical (weight, min index, max index) order.
    Raises DisconnectedGraphError naming the components when the edges do
    not span all n points.
    """
    u, v, w = _as_edge_arrays(edges)
    if n == 1:
        return SpanningTree(n=1, u=u[:0], v=v[:0], w=w[:0])
    u, v, w = canonical_edges(u, v, w)
    parent = np.arange(n, dtype=np.int64)
    tu = np.empty(n - 1, dtype=np.int64)
    tv = np.empty(n - 1, dtype=np.int64)
    tw = np.empty(n - 1, dtype=np.float64)
    cnt = 0
    chunk = 8192
    for s in range(0, len(u), chunk):
        cu = u[s : s + chunk]
        cv = v[s : s + chunk]
        # snapshot roots: equal roots cannot become a tree edge later
        ru = parent[cu]
        rv = parent[cv]
        while True:
            pu = parent[ru]
            pv = parent[rv]
            if (pu == ru).all() and (pv == rv).all():
                break
            ru, rv = pu, pv
        live = np.flatnonzero(ru != rv)
        for i in live:
            a = int(cu[i])
            b = int(cv[i])
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = int(parent[a])
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = int(parent[b])
            if a == b:
                continue
            parent[b] = a
            tu[cnt] = cu[i]
            tv[cnt] = cv[i]
            tw[cnt] = w[s + i]
            cnt += 1
        if cnt == n - 1:
            break
    if cnt < n - 1:
        roots = parent.copy()
        while True:
            nxt = roots[roots]
            if (nxt == roots).all():
                break
            roots = nxt
        comps = [np.flatnonzero(roots == r).tolist() for r in np.unique(roots)]
        raise DisconnectedGraphError(n, comps, tu[:cnt], tv[:cnt], tw[:cnt])
    cu, cv, cw = canonical_edges(tu, tv, tw)
    return SpanningTree(n=n, u=cu, v=cv, w=cw)


def connect_components(points: PointSet, forest) -> SpanningTree:
    """Complete an acyclic edge set into a spanning tree.

    While more than one component remains, the smallest component (ties by
    smallest member index) is joined to the rest through the exact
    minimum-distance cross pair, found by brute force.
    """
    n = points.n
    fu, fv, fw = _as_edge_arrays(forest)
    uf = UnionFind(n)
    for a, b in zip(fu, fv):
        uf.union(int(a), int(b))
    eu, ev, ew = list(fu), list(fv), list(fw)
    X = points.coords
    while uf.n_roots > 1:
        roots = np.array([uf.find(i) for i in range(n)])
        uniq, counts = np.unique(roots, return_counts=True)
        order = np.lexsort((uniq, counts))  # smallest size, then smallest root
        small = uniq[order[0]]
        members = np.flatnonzero(roots == small)
        others = np.flatnonzero(roots != small)
        block = cross_distances(X[members], X[others])
        flat = int(np.argmin(block))  # first minimum: lexicographic (member, other)
        mi, oi = divmod(flat, len(others))
        a, b = int(members[mi]), int(others[oi])
        eu.append(min(a, b))
        ev.append(max(a, b))
        ew.append(float(block[mi, oi]))
        uf.union(a, b)
    cu, cv, cw = canonical_edges(np.array(eu, dtype=np.int64), np.array(ev, dtype=np.int64), np.array(ew))
    return SpanningTree(n=n, u=cu, v=cv, w=cw)


def _prim(points: PointSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    X = points.coords
    n = points.n
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best_from = np.zeros(n, dtype=np.int64)
    in_tree[0] = True
    best_row = cross_distances(X[0:1], X)[0]
    np.minimum(best, best_row, out=best)
    best[0] = np.inf
    eu = np.empty(n - 1, dtype=np.int64)
    ev = np.empty(n - 1, dtype=np.int64)
    ew = np.empty(n - 1, dtype=np.float64)
    for step in range(n - 1):
        j = int(np.argmin(best))
        eu[step] = best_from[j]
        ev[step] = j
        ew[step] = best[j]
        in_tree[j] = True
        best[j] = np.inf
        row = cross_distances(X[j : j + 1], X)[0]
        closer = row < best
        closer &= ~in_tree
        best[closer] = row[closer]
        best_from[closer] = j
    return eu, ev, ew


def exact_mst(points: PointSet) -> SpanningTree:
    """True Euclidean MST with ties resolved exactly like kruskal over the
    complete graph, so exact_mst(p) == kruskal(n, all pairs) edge for edge."""
    n = points.n
    if n == 1:
        z = np.empty(0, dtype=np.int64)
        return SpanningTree(n=1, u=z, v=z.copy(), w=np.empty(0))
    X = points.coords
    if n <= _DENSE_KRUSKAL_LIMIT:
        iu, iv = np.triu_indices(n, 1)
        w = cross_distances(X, X)[iu, iv]
        return kruskal(n, (iu, iv, w))
    eu, ev, ew = _prim(points)
    # tie repair: rerun kruskal over the tree plus every pair whose weight
    # exactly matches a tree weight (every MST shares the weight multiset)
    tw = np.unique(ew)
    cand_u = [eu]
    cand_v = [ev]
    cand_w = [ew]
    block = 128
    for s in range(0, n, block):
        e = min(s + block, n)
        rows = cross_distances(X[s:e], X)
        hit = np.isin(rows, tw)
        hit[:, : s + 1] = False  # keep u < v only (column index > row index)
        ri, ci = np.nonzero(hit)
        keep = ci > ri + s
        ri, ci = ri[keep], ci[keep]
        if len(ri):
            cand_u.append(ri + s)
            cand_v.append(ci)
            cand_w.append(rows[ri, ci])
    return kruskal(n, (np.concatenate(cand_u), np.concatenate(cand_v), np.concatenate(cand_w)))


def kt_factor(points: PointSet, tree: SpanningTree) -> float:
    """Smallest gamma for which the tree is a gamma-approximate Kruskal tree.

    Equals the max over non-tree pairs of (heaviest edge on the tree path
    between them) / (their true distance), clamped below at 1.  All-pairs
    scan; intended for tests and bound certification, not production runs.
    """
    n = points.n
    if n < 3:
        return 1.0
    X = points.coords
    members: list[list[int] | None] = [[i] for i in range(n)]
    uf = UnionFind(n)
    worst = 1.0
    for ei in range(n - 1):  # tree edges are stored ascending already
        eu, ev = int(tree.u[ei]), int(tree.v[ei])
        a = uf.find(eu)
        b = uf.find(ev)
        wmax = float(tree.w[ei])
        ma, mb = members[a], members[b]
        if len(ma) * len(mb) > 1:
            block = cross_distances(X[ma], X[mb])
            ratios = wmax / block
            # the merging edge is the only tree pair crossing this cut
            ratios[ma.index(eu), mb.index(ev)] = 0.0
            top = float(ratios.max())
            if top > worst:
                worst = top
        r = uf.union(a, b)
        other = b if r == a else a
        members[r] = ma + mb
        members[other] = None
    return worst
