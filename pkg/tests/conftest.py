import numpy as np
import pytest

from smartigan.core import ClusteringState, Dataset


def brute_phi(points):
    """Cluster cost by explicit mean then sum, in plain Python floats."""
    points = [list(map(float, p)) for p in points]
    if not points:
        return 0.0
    d = len(points[0])
    mean = [sum(p[t] for p in points) / len(points) for t in range(d)]
    return sum(sum((p[t] - mean[t]) ** 2 for t in range(d)) for p in points)


def members(data, assignment, cluster):
    return [data.points[i] for i in range(data.n) if assignment[i] == cluster]


def random_instance(rng, n_max=20, d_max=4, k_max=5, n_min=2):
    """Random dataset plus a random assignment with no empty cluster."""
    n = int(rng.integers(n_min, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    k = int(rng.integers(1, min(k_max, n) + 1))
    pts = rng.normal(scale=rng.uniform(0.1, 10.0), size=(n, d)) + rng.uniform(-5, 5, size=d)
    a = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(a)
    data = Dataset(pts)
    return data, ClusteringState.from_assignment(data, a, k)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
