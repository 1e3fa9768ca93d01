"""
Fixed points of Lloyd and Hartigan
==================================

A Hartigan fixed point is always a Lloyd fixed point, never the other way
round in general.  Run both from the same random starts and count.
"""

import numpy as np

from smartigan import ClusteringState, Dataset
from smartigan.algorithms import is_hartigan_stable, is_lloyd_stable, run_hartigan, run_lloyd

rng = np.random.default_rng(0)
counts = dict(runs=0, hartigan_also_lloyd=0, lloyd_not_hartigan=0, hartigan_improves=0)

for trial in range(300):
    n, k = int(rng.integers(8, 40)), int(rng.integers(2, 6))
    data = Dataset(rng.normal(size=(n, 2)))
    start = ClusteringState.from_assignment(data, np.arange(n) % k, k)

    h, h_rep = run_hartigan(data, start, seed=trial)
    l, l_rep = run_lloyd(data, start)
    counts["runs"] += 1
    counts["hartigan_also_lloyd"] += is_lloyd_stable(data, h)
    if not is_hartigan_stable(data, l):
        counts["lloyd_not_hartigan"] += 1
        # one more Hartigan pass from Lloyd's answer can only lower the loss
        h2, rep2 = run_hartigan(data, l, seed=trial)
        counts["hartigan_improves"] += rep2.final_loss < l_rep.final_loss

for key, v in counts.items():
    print(f"{key:22s} {v}")
