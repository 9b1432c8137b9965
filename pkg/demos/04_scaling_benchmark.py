"""Growth-rate comparison: the approximate pipeline vs average linkage.

Emits one row per (algorithm, n) with mean wall time, ready for a
log-log plot.  The quadratic baseline falls behind quickly; on this
machine the crossover sits around a thousand points.
"""

import numpy as np

from ultrafit import PointSet, SpannerConfig, benchmark

rng = np.random.default_rng(11)
config = SpannerConfig(gamma=2.5, seed=1)

print(f"{'n':>6} {'algorithm':<10} {'mean_wall_ms':>14}  stage breakdown (ms)")
for n in (500, 1000, 2000, 4000, 8000):
    points = PointSet(rng.random((n, 16)))
    for row in benchmark(points, ["approx", "average"], repeats=1, config=config):
        stages = {k: round(v) for k, v in row["stage_ms"].items()}
        print(f"{n:>6} {row['algorithm']:<10} {row['mean_wall_ms']:>14.1f}  {stages}")
