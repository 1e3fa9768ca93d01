"""Initial partitions: random assignment, random centroids and k-means++.

All three return a :class:`~smartigan.core.ClusteringState` with no empty
cluster and are pure functions of ``(data, k, seed)``.  ``seed`` may be an
integer or a :class:`~smartigan.rng.RandomStream`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import ClusteringState, ContractError, Dataset, fill_empty_clusters
from .rng import as_stream

__all__ = [
    "InitSpec",
    "INIT_KINDS",
    "init_random_assignment",
    "init_random_centroids",
    "init_kmeans_pp",
    "initialize",
]

INIT_KINDS = ("random_assignment", "random_centroids", "kmeans_pp")
MAX_REDRAWS = 100


@dataclass(frozen=True)
class InitSpec:
    kind: str = "random_assignment"
    k: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ContractError(f"unknown init kind {self.kind!r}")
        if self.k < 1:
            raise ContractError("k must be >= 1")


def _check_k(data: Dataset, k: int) -> int:
    k = int(k)
    if not 1 <= k <= data.n:
        raise ContractError(f"need 1 <= k <= n, got k={k}, n={data.n}")
    return k


def init_random_assignment(data: Dataset, k: int, seed=0) -> ClusteringState:
    """Each point gets an independent uniform cluster label.

    Draws that leave a cluster empty are discarded and redrawn; after
    ``MAX_REDRAWS`` failures the labels fall back to ``i mod k``.
    """
    k = _check_k(data, k)
    stream = as_stream(seed)
    for _ in range(MAX_REDRAWS):
        a = stream.integers(0, k, size=data.n)
        if np.bincount(a, minlength=k).min() > 0:
            break
    else:
        a = np.arange(data.n) % k
    return ClusteringState.from_assignment(data, a, k)


def _assign_to_centers(data: Dataset, centers: np.ndarray) -> ClusteringState:
    k = centers.shape[0]
    labels, _ = _kernels.nearest_centroids(data.points, centers, np.ones(k, dtype=np.bool_))
    state = ClusteringState.from_assignment(data, labels, k)
    fill_empty_clusters(data, state)
    return state


def init_random_centroids(data: Dataset, k: int, seed=0) -> ClusteringState:
    """Forgy seeding: ``k`` distinct data points as provisional centroids."""
    k = _check_k(data, k)
    stream = as_stream(seed)
    idx = stream.generator.choice(data.n, size=k, replace=False)
    return _assign_to_centers(data, data.points[idx])


def kmeans_pp_centers(data: Dataset, k: int, seed=0) -> np.ndarray:
    """Indices of ``k`` centers chosen by D^2 sampling.

    The first center is uniform.  Each later one is drawn with probability
    proportional to the squared distance to the nearest chosen center; if
    every point already coincides with a center the draw is uniform.
    """
    k = _check_k(data, k)
    stream = as_stream(seed)
    X = data.points
    chosen = [int(stream.integers(0, data.n))]
    d2 = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        u = stream.uniform()
        total = d2.sum()
        if total > 0:
            cum = np.cumsum(d2)
            i = int(np.searchsorted(cum, u * cum[-1], side="right"))
            if i >= data.n or d2[i] == 0:
                i = int(np.flatnonzero(d2)[-1])
        else:
            i = min(int(u * data.n), data.n - 1)
        chosen.append(i)
        d2 = np.minimum(d2, ((X - X[i]) ** 2).sum(axis=1))
    return np.array(chosen, dtype=np.int64)


def init_kmeans_pp(data: Dataset, k: int, seed=0) -> ClusteringState:
    """k-means++ seeding followed by nearest-center assignment."""
    idx = kmeans_pp_centers(data, k, seed)
    return _assign_to_centers(data, data.points[idx])


_DISPATCH = {
    "random_assignment": init_random_assignment,
    "random_centroids": init_random_centroids,
    "kmeans_pp": init_kmeans_pp,
}


def initialize(data: Dataset, spec: InitSpec, stream=None) -> ClusteringState:
    return _DISPATCH[spec.kind](data, spec.k, spec.rng_seed if stream is None else stream)
