"""Distortion measurement and timing harness.

Distortion is the exact all-pairs statistic max (and min, mean) of
ultrametric distance over true distance.  The scan walks the dendrogram's
internal nodes, so every pair is visited once at its LCA; no sampling, a
max statistic would miss its argmax otherwise.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .core import PointSet, cross_distances
from .dendro import Dendrogram, normalize
from .spanner import SpannerConfig
from . import pipeline as _pipeline

_BLOCK_ELEMS = 1 << 22


@dataclass
class DistortionReport:
    max_ratio: float
    min_ratio: float
    mean_ratio: float
    argmax_pair: tuple[int, int]
    n: int
    algorithm: str = ""
    scale: float | None = None

    def to_dict(self) -> dict:
        return {
            "max": self.max_ratio,
            "min": self.min_ratio,
            "mean": self.mean_ratio,
            "argmax_pair": list(self.argmax_pair),
            "n": self.n,
            "algorithm": self.algorithm,
            "scale": self.scale,
        }


def distortion(
    points: PointSet,
    dendro: Dendrogram,
    normalize_first: bool = False,
    algorithm: str = "",
) -> DistortionReport:
    """Exact all-pairs ratio scan of LCA height / Euclidean distance.

    With normalize_first the dendrogram is scaled to dominate the metric
    first and the scale is reported.  Zero pairwise distances are refused:
    deduplicate the input instead.
    """
    if points.n != dendro.n:
        raise ValueError("point set and dendrogram sizes differ")
    if points.n < 2:
        raise ValueError("distortion needs at least 2 points")
    scale = None
    if normalize_first:
        dendro, scale = normalize(dendro, points)
    X = points.coords
    best = -np.inf
    worst = np.inf
    total = 0.0
    count = 0
    arg = (0, 0)
    for h, a_ids, b_ids in dendro.cross_blocks():
        rows = max(1, _BLOCK_ELEMS // max(1, len(b_ids)))
        for s in range(0, len(a_ids), rows):
            aa = a_ids[s : s + rows]
            block = cross_distances(X[aa], X[b_ids])
            if (block == 0).any():
                ai, bi = np.argwhere(block == 0)[0]
                raise ValueError(
                    f"zero distance between points {int(aa[ai])} and {int(b_ids[bi])}: dedupe first"
                )
            ratios = h / block
            flat = int(np.argmax(ratios))
            ai, bi = divmod(flat, ratios.shape[1])
            if ratios[ai, bi] > best:
                best = float(ratios[ai, bi])
                arg = (int(aa[ai]), int(b_ids[bi]))
            worst = min(worst, float(ratios.min()))
            total += float(ratios.sum())
            count += ratios.size
    return DistortionReport(
        max_ratio=best,
        min_ratio=worst,
        mean_ratio=total / count,
        argmax_pair=(min(arg), max(arg)),
        n=points.n,
        algorithm=algorithm,
        scale=scale,
    )


def benchmark(
    points: PointSet,
    algorithms,
    repeats: int = 3,
    seed: int = 0,
    gamma: float = 2.5,
    config: SpannerConfig | None = None,
) -> list[dict]:
    """Wall-clock per algorithm, arithmetic mean over repeats.

    Rows carry per-stage means from the fitters, ready for log-scale
    plotting.  An empty algorithm list produces an empty table.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    cfg = config or SpannerConfig(gamma=gamma, seed=seed)
    rows = []
    for name in algorithms:
        walls = []
        stage_acc: dict[str, float] = {}
        edges = {}
        for _ in range(repeats):
            t0 = time.perf_counter()
            res = _pipeline.run_algorithm(name, points, cfg)
            walls.append((time.perf_counter() - t0) * 1e3)
            for key, ms in res.timings_ms.items():
                stage_acc[key] = stage_acc.get(key, 0.0) + ms
            edges = res.edge_counts
        rows.append(
            {
                "algorithm": name,
                "n": points.n,
                "d": points.d,
                "repeats": repeats,
                "mean_wall_ms": sum(walls) / repeats,
                "stage_ms": {k: v / repeats for k, v in stage_acc.items()},
                "edge_counts": edges,
            }
        )
    return rows
