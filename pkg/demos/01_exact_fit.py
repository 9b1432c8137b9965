"""Fit the optimal ultrametric to a small point set and inspect it.

The exact pipeline (MST, exact cut weights, cartesian tree) achieves the
best possible max distortion among all ultrametrics dominating the
metric; on tiny inputs we can verify that against exhaustive search over
every rooted binary topology.
"""

import numpy as np

from ultrafit import (
    PointSet,
    brute_force_opt_alpha,
    distortion,
    farach_exact,
    format_merge_list,
    to_newick,
)

rng = np.random.default_rng(0)
points = PointSet(rng.random((7, 2)))

result = farach_exact(points)
report = distortion(points, result.dendrogram, algorithm="exact")

print("merge list (left right height size):")
print(format_merge_list(result.dendrogram))
print("newick:", to_newick(result.dendrogram))
print(f"max distortion      : {report.max_ratio:.6f} at pair {report.argmax_pair}")
print(f"min ratio           : {report.min_ratio:.6f} (>= 1: the output dominates the metric)")
print(f"exhaustive optimum  : {brute_force_opt_alpha(points):.6f} (equal: output is optimal)")

# the three collinear points 0, 1, 3 worked end to end:
line = PointSet([[0.0], [1.0], [3.0]])
res = farach_exact(line)
print("\ncollinear example {0, 1, 3}:")
print(format_merge_list(res.dendrogram), end="")
print("distortion:", distortion(line, res.dendrogram).max_ratio)
