"""The sub-quadratic pipeline, stage by stage, with its certified bound.

Builds the multi-scale spanner, runs Kruskal on it, estimates cut weights
within a factor 5, and reads off the ultrametric.  The output provably
satisfies  w(u,v) <= D(u,v) <= 5 * gamma_emp * alpha_opt * w(u,v)
for every pair, where gamma_emp is the measured approximate-Kruskal
factor of the tree and alpha_opt the optimal distortion.
"""

import numpy as np

from ultrafit import (
    PointSet,
    SpannerConfig,
    approx_ult,
    build_spanner,
    distortion,
    farach_exact,
    kt_factor,
    verify_stretch,
)

rng = np.random.default_rng(7)
points = PointSet(rng.random((400, 8)))
config = SpannerConfig(gamma=2.0, seed=42)

graph = build_spanner(points, config)
complete = points.n * (points.n - 1) // 2
print(f"spanner: {graph.edge_count} edges ({graph.edge_count / complete:.1%} of complete graph)")
print(f"all-pairs stretch: {verify_stretch(points, graph, sample=complete):.3f}")

result = approx_ult(points, config)
print("\nstage timings (ms):", {k: round(v, 1) for k, v in result.timings_ms.items()})

gamma_emp = kt_factor(points, result.tree)
alpha_opt = distortion(points, farach_exact(points).dendrogram).max_ratio
report = distortion(points, result.dendrogram, algorithm="approx")
bound = 5 * gamma_emp * alpha_opt

print(f"\nmeasured tree quality gamma_emp : {gamma_emp:.4f}")
print(f"optimal distortion alpha_opt    : {alpha_opt:.4f}")
print(f"certified ceiling 5*g*a         : {bound:.4f}")
print(f"observed max distortion         : {report.max_ratio:.4f}")
print(f"observed min ratio              : {report.min_ratio:.4f} (never below 1)")
assert report.min_ratio >= 1.0
assert report.max_ratio <= bound * (1 + 1e-9)
print("certificate holds.")
