"""Compiled inner loops.

Everything here works on raw arrays: ``X`` (n, d) float64 points,
``assign`` (n,) int64 cluster ids, ``sizes`` (k,) int64 and ``sums`` (k, d)
float64 coordinate sums.  The Python layer owns validation; these functions
trust their inputs.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def sq_dist_to_centroid(X, i, sums, sizes, j):
    """Squared distance from point ``i`` to centroid ``sums[j] / sizes[j]``."""
    s = sizes[j]
    acc = 0.0
    for t in range(X.shape[1]):
        diff = X[i, t] - sums[j, t] / s
        acc += diff * diff
    return acc


@njit(**_JIT)
def insertion_cost(X, i, sums, sizes, j):
    s = sizes[j]
    if s == 0:
        return 0.0
    return s / (s + 1.0) * sq_dist_to_centroid(X, i, sums, sizes, j)


@njit(**_JIT)
def removal_gain(X, i, sums, sizes, r):
    s = sizes[r]
    return s / (s - 1.0) * sq_dist_to_centroid(X, i, sums, sizes, r)


@njit(**_JIT)
def means_of(sums, sizes):
    k, d = sums.shape
    means = np.zeros((k, d), dtype=np.float64)
    for j in range(k):
        if sizes[j] > 0:
            for t in range(d):
                means[j, t] = sums[j, t] / sizes[j]
    return means


@njit(**_JIT)
def best_target(X, i, assign, means, sizes):
    """Cheapest cluster to insert point ``i`` into, excluding its own.

    Returns ``(target, cost)``; ties go to the lowest index, ``target`` is -1
    when there is no other cluster.  ``means[j]`` must equal
    ``sums[j] / sizes[j]`` for every non-empty ``j``.
    """
    r = assign[i]
    d = X.shape[1]
    best_j = -1
    best = np.inf
    for j in range(sizes.shape[0]):
        if j == r:
            continue
        s = sizes[j]
        if s == 0:
            c = 0.0
        else:
            f = s / (s + 1.0)
            acc = 0.0
            pruned = False
            for t in range(d):
                diff = X[i, t] - means[j, t]
                acc += diff * diff
                # partial sums only grow, so this cluster can no longer win
                if f * acc >= best:
                    pruned = True
                    break
            if pruned:
                continue
            c = f * acc
        if c < best:
            best = c
            best_j = j
    return best_j, best


@njit(**_JIT)
def own_removal_gain(X, i, means, sizes, r):
    s = sizes[r]
    acc = 0.0
    for t in range(X.shape[1]):
        diff = X[i, t] - means[r, t]
        acc += diff * diff
    return s / (s - 1.0) * acc


@njit(**_JIT)
def move(X, i, assign, sums, sizes, j):
    r = assign[i]
    for t in range(X.shape[1]):
        sums[r, t] -= X[i, t]
        sums[j, t] += X[i, t]
    sizes[r] -= 1
    sizes[j] += 1
    assign[i] = j


@njit(**_JIT)
def move_cached(X, i, assign, sums, sizes, means, j):
    r = assign[i]
    move(X, i, assign, sums, sizes, j)
    for t in range(X.shape[1]):
        means[j, t] = sums[j, t] / sizes[j]
        means[r, t] = sums[r, t] / sizes[r] if sizes[r] > 0 else 0.0


@njit(**_JIT)
def local_search_epoch(X, perm, assign, sums, sizes, means, multiplier):
    """One pass over ``perm``; returns the number of accepted moves.

    A point in a singleton cluster is skipped.  Otherwise it moves to the
    cheapest other cluster when ``insertion <= removal * multiplier``.
    """
    moves = 0
    for p in range(perm.shape[0]):
        i = perm[p]
        r = assign[i]
        if sizes[r] <= 1:
            continue
        j, cost = best_target(X, i, assign, means, sizes)
        if j < 0:
            continue
        if cost <= own_removal_gain(X, i, means, sizes, r) * multiplier:
            move_cached(X, i, assign, sums, sizes, means, j)
            moves += 1
    return moves


@njit(**_JIT)
def hartigan_violations(X, assign, sums, sizes):
    """Count non-singleton points that a multiplier-1 pass would move."""
    means = means_of(sums, sizes)
    count = 0
    for i in range(X.shape[0]):
        r = assign[i]
        if sizes[r] <= 1:
            continue
        j, cost = best_target(X, i, assign, means, sizes)
        if j >= 0 and cost <= own_removal_gain(X, i, means, sizes, r):
            count += 1
    return count


@njit(**_JIT)
def nearest_centroids(X, centroids, active):
    """Index of and squared distance to the nearest active centroid.

    Ties resolve to the lowest index.
    """
    n, d = X.shape
    k = centroids.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.float64)
    for i in range(n):
        best = np.inf
        best_j = -1
        for j in range(k):
            if not active[j]:
                continue
            acc = 0.0
            for t in range(d):
                diff = X[i, t] - centroids[j, t]
                acc += diff * diff
            if acc < best:
                best = acc
                best_j = j
        labels[i] = best_j
        dists[i] = best
    return labels, dists


@njit(**_JIT)
def point_to_own_centroid(X, assign, centroids):
    n, d = X.shape
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        j = assign[i]
        acc = 0.0
        for t in range(d):
            diff = X[i, t] - centroids[j, t]
            acc += diff * diff
        out[i] = acc
    return out


@njit(**_JIT)
def cluster_sums(X, assign, k):
    n, d = X.shape
    sums = np.zeros((k, d), dtype=np.float64)
    sizes = np.zeros(k, dtype=np.int64)
    for i in range(n):
        j = assign[i]
        sizes[j] += 1
        for t in range(d):
            sums[j, t] += X[i, t]
    return sums, sizes


@njit(**_JIT)
def sse(X, assign, sums, sizes):
    """Sum of squared distances of every point to its cluster centroid."""
    total = 0.0
    for i in range(X.shape[0]):
        total += sq_dist_to_centroid(X, i, sums, sizes, assign[i])
    return total


@njit(**_JIT)
def fisher_yates(draws):
    """Permutation of ``range(len(draws) + 1)`` from pre-drawn swap indices.

    ``draws[m]`` must lie in ``[0, n - 1 - m]``: step ``m`` swaps position
    ``n - 1 - m`` with ``draws[m]``.
    """
    n = draws.shape[0] + 1
    perm = np.arange(n)
    for m in range(n - 1):
        i = n - 1 - m
        j = draws[m]
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return perm


@njit(**_JIT)
def fisher_yates_rows(draws):
    out = np.empty((draws.shape[0], draws.shape[1] + 1), dtype=np.int64)
    for e in range(draws.shape[0]):
        out[e] = fisher_yates(draws[e])
    return out


@njit(**_JIT)
def local_search_run(X, perms, mults, assign, sums, sizes, moves_out, loss_out, refresh_every):
    """Run epochs ``0 .. len(perms)-1`` until one makes no move.

    Epoch ``e`` visits points in order ``perms[e]`` with acceptance
    multiplier ``mults[e]``.  Returns the number of epochs executed; moves
    and the post-epoch loss are written to ``moves_out`` / ``loss_out``.
    Sums are rebuilt from the assignment every ``refresh_every`` moves.
    """
    k = sizes.shape[0]
    means = means_of(sums, sizes)
    since = 0
    for e in range(perms.shape[0]):
        m = local_search_epoch(X, perms[e], assign, sums, sizes, means, mults[e])
        since += m
        if since >= refresh_every:
            fresh, _ = cluster_sums(X, assign, k)
            sums[:, :] = fresh
            means[:, :] = means_of(sums, sizes)
            since = 0
        moves_out[e] = m
        loss_out[e] = sse(X, assign, sums, sizes)
        if m == 0:
            return e + 1
    return perms.shape[0]
