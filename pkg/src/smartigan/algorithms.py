"""Lloyd, Hartigan and Smartigan optimizers.

Hartigan and Smartigan share :func:`run_local_search`; they differ only in
the :class:`~smartigan.core.ScheduleSpec` that scales the acceptance
threshold.  Each epoch visits the points in a fresh uniform permutation and
moves a point to the cluster with the cheapest insertion cost when

    insertion_cost <= removal_gain * multiplier(epoch)

Points alone in their cluster are skipped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core import (
    ClusteringState,
    ContractError,
    Dataset,
    RunReport,
    REFRESH_EVERY,
    ScheduleSpec,
    _check_compatible,
    fill_empty_clusters,
    total_loss,
)
from .rng import RandomStream, as_stream

__all__ = [
    "LocalSearchConfig",
    "run_lloyd",
    "run_local_search",
    "run_hartigan",
    "run_smartigan",
    "is_lloyd_stable",
    "is_hartigan_stable",
]

DEFAULT_MAX_ITERATIONS = 100


@dataclass(frozen=True)
class LocalSearchConfig:
    """Settings for :func:`run_local_search`.

    ``finish_with_hartigan=None`` means "on for a decaying schedule, off
    for constant one".
    """

    schedule: ScheduleSpec = ScheduleSpec()
    finish_with_hartigan: Optional[bool] = None
    rng_seed: int = 0

    @property
    def max_iterations(self) -> int:
        return self.schedule.max_iterations

    @property
    def finishes(self) -> bool:
        if self.schedule.kind == "constant_one":
            return False
        return True if self.finish_with_hartigan is None else bool(self.finish_with_hartigan)


EMPTY_POLICIES = ("reseed", "keep")


def run_lloyd(
    data: Dataset,
    initial: ClusteringState,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    empty: str = "reseed",
) -> tuple[ClusteringState, RunReport]:
    """Alternate nearest-centroid assignment and centroid updates.

    Stops after the first iteration that changes no assignment, or after
    ``max_iterations``.  Ties go to the lowest cluster index.

    ``empty`` decides what happens to a cluster that loses all its points:
    ``"reseed"`` moves the point farthest from its own centroid into it,
    ``"keep"`` leaves it empty for the rest of the run (the textbook
    behaviour, which effectively lowers k).
    """
    if max_iterations < 0:
        raise ContractError("max_iterations must be >= 0")
    if empty not in EMPTY_POLICIES:
        raise ContractError(f"unknown empty-cluster policy {empty!r}")
    reseed = empty == "reseed"
    _check_compatible(data, initial)
    t0 = time.perf_counter()
    state = initial.copy()
    if reseed:
        fill_empty_clusters(data, state)
    X = data.points
    trace = [total_loss(data, state)]
    moves_trace = []
    converged = False
    it = 0
    while it < max_iterations:
        it += 1
        labels, _ = _kernels.nearest_centroids(X, state.centroids(), state.sizes > 0)
        changed = int(np.count_nonzero(labels != state.assignment))
        if changed:
            state.assignment = labels
            state.refresh(data)
            if reseed:
                changed += fill_empty_clusters(data, state)
        trace.append(total_loss(data, state))
        moves_trace.append(changed)
        if changed == 0:
            converged = True
            break
    report = RunReport(
        final_loss=trace[-1],
        iterations_used=it,
        converged=converged,
        algorithm="lloyd",
        dataset=data.name,
        k=state.k,
        max_iterations=max_iterations,
        initial_loss=trace[0],
        wall_time=time.perf_counter() - t0,
        loss_trace=trace,
        moves_trace=moves_trace,
    )
    return state, report


def _run_phase(data, state, stream, multipliers, trace, moves_trace, mult_trace):
    """Execute epochs with the given multipliers until one makes no move.

    Permutations are drawn in growing blocks; since a block of rows equals
    the one-at-a-time sequence, epoch ``t`` always sees the stream's
    ``t``-th permutation regardless of block size.
    """
    done = 0
    block = 4
    total = len(multipliers)
    while done < total:
        m = min(block, total - done)
        perms = stream.permutations(data.n, m)
        mults = np.asarray(multipliers[done:done + m], dtype=np.float64)
        moves = np.zeros(m, dtype=np.int64)
        losses = np.zeros(m, dtype=np.float64)
        ran = _kernels.local_search_run(
            data.points, perms, mults, state.assignment, state.centroid_sums,
            state.sizes, moves, losses, REFRESH_EVERY,
        )
        trace.extend(losses[:ran].tolist())
        moves_trace.extend(moves[:ran].tolist())
        mult_trace.extend(mults[:ran].tolist())
        state.note_moves(data, int(moves[:ran].sum()))
        done += ran
        if ran < m:
            return done, True
        block *= 2
    return done, False


def run_local_search(
    data: Dataset,
    initial: ClusteringState,
    config: LocalSearchConfig = LocalSearchConfig(),
    stream: Optional[RandomStream] = None,
) -> tuple[ClusteringState, RunReport]:
    """Hartigan-style single-point local search under an acceptance schedule.

    Parameters
    ----------
    data : Dataset
    initial : ClusteringState
        Starting partition; it is copied, never mutated.
    config : LocalSearchConfig
        With a ``constant_one`` schedule this is Hartigan's method, with
        ``linear_decay`` it is Smartigan.
    stream : RandomStream, optional
        Source of the per-epoch permutations.  Defaults to a stream seeded
        with ``config.rng_seed``.

    Returns
    -------
    state : ClusteringState
    report : RunReport
    """
    _check_compatible(data, initial)
    t0 = time.perf_counter()
    stream = as_stream(config.rng_seed if stream is None else stream)
    schedule = config.schedule
    n_max = schedule.max_iterations
    state = initial.copy()
    trace = [total_loss(data, state)]
    moves_trace, mult_trace = [], []

    n_iter, converged = _run_phase(
        data, state, stream, [schedule.multiplier(t) for t in range(n_max)],
        trace, moves_trace, mult_trace,
    )
    finish = 0
    if config.finishes:
        finish, converged = _run_phase(
            data, state, stream, [1.0] * n_max, trace, moves_trace, mult_trace
        )

    if schedule.kind == "constant_one":
        name = "hartigan"
    else:
        name = "smartigan_star" if config.finishes else "smartigan"
    report = RunReport(
        final_loss=trace[-1],
        iterations_used=n_iter,
        converged=converged,
        seed=stream.key,
        algorithm=name,
        dataset=data.name,
        k=state.k,
        max_iterations=n_max,
        initial_loss=trace[0],
        finish_iterations=finish,
        wall_time=time.perf_counter() - t0,
        loss_trace=trace,
        moves_trace=moves_trace,
        multiplier_trace=mult_trace,
    )
    return state, report


def run_hartigan(data, initial, max_iterations=DEFAULT_MAX_ITERATIONS, seed=0, stream=None):
    config = LocalSearchConfig(ScheduleSpec.hartigan(max_iterations), rng_seed=seed)
    return run_local_search(data, initial, config, stream)


def run_smartigan(
    data, initial, max_iterations=DEFAULT_MAX_ITERATIONS, seed=0, stream=None, finish_with_hartigan=True
):
    config = LocalSearchConfig(
        ScheduleSpec.smartigan(max_iterations), finish_with_hartigan, rng_seed=seed
    )
    return run_local_search(data, initial, config, stream)


def is_lloyd_stable(data: Dataset, state: ClusteringState) -> bool:
    """True iff every point sits with a nearest centroid (ties allowed)."""
    _check_compatible(data, state)
    cents = state.centroids()
    _, nearest = _kernels.nearest_centroids(data.points, np.nan_to_num(cents), state.sizes > 0)
    own = _kernels.point_to_own_centroid(data.points, state.assignment, np.nan_to_num(cents))
    return bool(np.all(own <= nearest))


def is_hartigan_stable(data: Dataset, state: ClusteringState) -> bool:
    """True iff a multiplier-1 pass in any order would move no point."""
    _check_compatible(data, state)
    return (
        _kernels.hartigan_violations(
            data.points, state.assignment, state.centroid_sums, state.sizes
        )
        == 0
    )
