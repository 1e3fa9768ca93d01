"""Domain types, the k-means loss and the single-point move algebra.

Centroids are never stored as means.  A :class:`ClusteringState` keeps the
per-cluster coordinate sums and counts, so moving a point is an exact
subtraction and addition and the mean is formed only when read.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels

__all__ = [
    "ContractError",
    "Dataset",
    "ClusteringState",
    "ScheduleSpec",
    "RunReport",
    "total_loss",
    "phi",
    "insertion_cost",
    "removal_gain",
    "delta_decrease",
    "move_point",
    "fill_empty_clusters",
]

# full recomputation of centroid sums after this many incremental moves
REFRESH_EVERY = 10_000


class ContractError(ValueError):
    """Raised when an argument violates an operation's precondition."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable ``(n, d)`` point set with optional integer labels."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C")
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ContractError(f"points must be a non-empty (n, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ContractError("points contain non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=np.int64)
            if lab.shape != (pts.shape[0],):
                raise ContractError(
                    f"labels must have length {pts.shape[0]}, got shape {lab.shape}"
                )
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        lab = "labelled" if self.labels is not None else "unlabelled"
        return f"Dataset(name={self.name!r}, n={self.n}, d={self.d}, {lab})"


class ClusteringState:
    """Mutable partition of a dataset into ``k`` clusters.

    Attributes
    ----------
    k : int
    assignment : ndarray of int64, shape (n,)
    sizes : ndarray of int64, shape (k,)
    centroid_sums : ndarray of float64, shape (k, d)
    """

    def __init__(self, k, assignment, sizes, centroid_sums):
        self.k = int(k)
        self.assignment = assignment
        self.sizes = sizes
        self.centroid_sums = centroid_sums
        self.moves_since_refresh = 0

    @classmethod
    def from_assignment(cls, data: Dataset, assignment, k: int) -> "ClusteringState":
        a = np.array(assignment, dtype=np.int64)
        if a.shape != (data.n,):
            raise ContractError(f"assignment must have length {data.n}")
        if not 1 <= k <= data.n:
            raise ContractError(f"need 1 <= k <= n, got k={k}, n={data.n}")
        if a.size and (a.min() < 0 or a.max() >= k):
            raise ContractError(f"assignment entries must lie in [0, {k})")
        sums, sizes = _kernels.cluster_sums(data.points, a, k)
        return cls(k, a, sizes, sums)

    def copy(self) -> "ClusteringState":
        return ClusteringState(
            self.k, self.assignment.copy(), self.sizes.copy(), self.centroid_sums.copy()
        )

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def centroids(self) -> np.ndarray:
        """Cluster means; rows of empty clusters are NaN."""
        out = np.full(self.centroid_sums.shape, np.nan)
        nz = self.sizes > 0
        out[nz] = self.centroid_sums[nz] / self.sizes[nz, None]
        return out

    def refresh(self, data: Dataset) -> None:
        """Recompute sums and sizes from the assignment."""
        self.centroid_sums, self.sizes = _kernels.cluster_sums(
            data.points, self.assignment, self.k
        )
        self.moves_since_refresh = 0

    def note_moves(self, data: Dataset, moves: int) -> None:
        self.moves_since_refresh += moves
        if self.moves_since_refresh >= REFRESH_EVERY:
            self.refresh(data)

    def check(self, data: Dataset, rtol: float = 1e-9) -> None:
        """Raise :class:`ContractError` unless every state invariant holds."""
        _check_compatible(data, self)
        a = self.assignment
        if a.min() < 0 or a.max() >= self.k:
            raise ContractError("assignment out of range")
        sums, sizes = _kernels.cluster_sums(data.points, a, self.k)
        if not np.array_equal(sizes, self.sizes):
            raise ContractError("sizes disagree with assignment")
        scale = np.abs(data.points).sum(axis=0).max() + 1.0
        if not np.allclose(self.centroid_sums, sums, rtol=rtol, atol=rtol * scale):
            raise ContractError("centroid sums drifted from member sums")

    def __eq__(self, other):
        if not isinstance(other, ClusteringState):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.assignment, other.assignment)
            and np.array_equal(self.sizes, other.sizes)
            and np.array_equal(self.centroid_sums, other.centroid_sums)
        )

    def __repr__(self):
        return f"ClusteringState(k={self.k}, sizes={self.sizes.tolist()})"


SCHEDULE_KINDS = ("constant_one", "linear_decay")


@dataclass(frozen=True)
class ScheduleSpec:
    """Acceptance-threshold multiplier as a function of the epoch counter.

    ``constant_one`` gives Hartigan's rule.  ``linear_decay`` starts at 3/2
    and falls linearly to 1 at ``max_iterations``, which is Smartigan.
    """

    kind: str = "constant_one"
    max_iterations: int = 100

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ContractError(f"unknown schedule kind {self.kind!r}")
        if int(self.max_iterations) < 0:
            raise ContractError("max_iterations must be >= 0")

    def multiplier(self, n_iter: int) -> float:
        # a zero horizon runs no epochs; 1.0 keeps the function total
        if self.kind == "constant_one" or self.max_iterations == 0:
            return 1.0
        return max(1.0, 1.5 - n_iter / (2.0 * self.max_iterations))

    @classmethod
    def hartigan(cls, max_iterations: int = 100) -> "ScheduleSpec":
        return cls("constant_one", max_iterations)

    @classmethod
    def smartigan(cls, max_iterations: int = 100) -> "ScheduleSpec":
        return cls("linear_decay", max_iterations)


@dataclass
class RunReport:
    """Outcome of one optimizer run.

    ``iterations_used`` counts main-phase epochs (or Lloyd iterations) and
    never exceeds ``max_iterations``.  Hartigan finishing epochs after a
    Smartigan run are counted separately in ``finish_iterations``.
    ``loss_trace`` holds the loss before the first epoch followed by the
    loss after every executed epoch, finishing epochs included.
    """

    final_loss: float
    iterations_used: int
    converged: bool
    seed: int = 0
    nmi: Optional[float] = None
    algorithm: str = ""
    dataset: str = ""
    k: int = 0
    max_iterations: int = 0
    initial_loss: float = float("nan")
    finish_iterations: int = 0
    wall_time: float = 0.0
    loss_trace: list = field(default_factory=list)
    moves_trace: list = field(default_factory=list)
    multiplier_trace: list = field(default_factory=list)


def _check_compatible(data: Dataset, state: ClusteringState) -> None:
    if state.assignment.shape != (data.n,):
        raise ContractError(
            f"state covers {state.assignment.shape[0]} points, dataset has {data.n}"
        )
    if state.centroid_sums.shape != (state.k, data.d):
        raise ContractError(
            f"centroid sums have shape {state.centroid_sums.shape}, expected ({state.k}, {data.d})"
        )


def _check_cluster(state: ClusteringState, cluster: int) -> int:
    cluster = int(cluster)
    if not 0 <= cluster < state.k:
        raise IndexError(f"cluster {cluster} out of range [0, {state.k})")
    return cluster


def _check_point(state: ClusteringState, point: int) -> int:
    point = int(point)
    if not 0 <= point < state.n:
        raise IndexError(f"point {point} out of range [0, {state.n})")
    return point


def total_loss(data: Dataset, state: ClusteringState) -> float:
    """Sum over points of the squared distance to their cluster centroid."""
    _check_compatible(data, state)
    return float(_kernels.sse(data.points, state.assignment, state.centroid_sums, state.sizes))


def phi(data: Dataset, state: ClusteringState, cluster: int) -> float:
    """Contribution of one cluster to the loss; 0 for an empty cluster."""
    _check_compatible(data, state)
    cluster = _check_cluster(state, cluster)
    if state.sizes[cluster] == 0:
        return 0.0
    members = data.points[state.assignment == cluster]
    mu = state.centroid_sums[cluster] / state.sizes[cluster]
    return float(((members - mu) ** 2).sum())


def insertion_cost(data: Dataset, state: ClusteringState, point: int, target: int) -> float:
    """Loss increase from adding ``point`` to ``target``: ``s/(s+1) * |x - mu|^2``.

    Inserting into an empty cluster costs 0.
    """
    _check_compatible(data, state)
    point = _check_point(state, point)
    target = _check_cluster(state, target)
    return float(
        _kernels.insertion_cost(data.points, point, state.centroid_sums, state.sizes, target)
    )


def removal_gain(data: Dataset, state: ClusteringState, point: int) -> float:
    """Loss decrease from taking ``point`` out of its cluster: ``s/(s-1) * |x - mu|^2``."""
    _check_compatible(data, state)
    point = _check_point(state, point)
    r = state.assignment[point]
    if state.sizes[r] < 2:
        raise ContractError(f"point {point} is alone in cluster {r}")
    return float(_kernels.removal_gain(data.points, point, state.centroid_sums, state.sizes, r))


def delta_decrease(data: Dataset, state: ClusteringState, point: int, target: int) -> float:
    """Exact decrease of the loss if ``point`` moves to ``target``.

    Positive iff the move strictly lowers the loss.
    """
    point = _check_point(state, point)
    target = _check_cluster(state, target)
    if target == state.assignment[point]:
        raise ContractError("target equals the point's current cluster")
    return removal_gain(data, state, point) - insertion_cost(data, state, point, target)


def move_point(data: Dataset, state: ClusteringState, point: int, target: int) -> ClusteringState:
    """Reassign ``point`` to ``target`` in place, updating sums in O(d)."""
    _check_compatible(data, state)
    point = _check_point(state, point)
    target = _check_cluster(state, target)
    if target == state.assignment[point]:
        raise ContractError("target equals the point's current cluster")
    _kernels.move(data.points, point, state.assignment, state.centroid_sums, state.sizes, target)
    state.note_moves(data, 1)
    return state


def fill_empty_clusters(data: Dataset, state: ClusteringState) -> int:
    """Re-seed each empty cluster with the point farthest from its centroid.

    Candidates are points whose cluster has at least two members.  Returns
    the number of clusters repaired.
    """
    repaired = 0
    for j in np.flatnonzero(state.sizes == 0):
        cents = state.centroids()
        dist = _kernels.point_to_own_centroid(data.points, state.assignment, np.nan_to_num(cents))
        dist[state.sizes[state.assignment] < 2] = -1.0
        i = int(np.argmax(dist))
        _kernels.move(data.points, i, state.assignment, state.centroid_sums, state.sizes, int(j))
        repaired += 1
    if repaired:
        state.refresh(data)
    return repaired
