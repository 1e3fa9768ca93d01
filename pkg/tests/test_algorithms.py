import itertools

import numpy as np
import pytest

from smartigan.algorithms import (
    LocalSearchConfig,
    is_hartigan_stable,
    is_lloyd_stable,
    run_hartigan,
    run_lloyd,
    run_local_search,
    run_smartigan,
)
from smartigan.core import ClusteringState, ContractError, Dataset, ScheduleSpec, total_loss
from smartigan.init import init_random_assignment
from smartigan.rng import RandomStream

from conftest import brute_phi, random_instance


def state_for(points, assignment, k):
    data = Dataset(np.asarray(points, dtype=float))
    return data, ClusteringState.from_assignment(data, assignment, k)


def brute_best_partition(points, k):
    """Minimum loss over all labelings with no empty cluster."""
    n = len(points)
    best = np.inf
    for labels in itertools.product(range(k), repeat=n):
        if len(set(labels)) < k:
            continue
        loss = sum(brute_phi([points[i] for i in range(n) if labels[i] == c]) for c in range(k))
        best = min(best, loss)
    return best


def nondecreasing_violations(trace, tol=1e-9):
    return [t for t in range(1, len(trace)) if trace[t] > trace[t - 1] + tol * max(1.0, trace[t - 1])]


# -- Lloyd --------------------------------------------------------------------------

def test_lloyd_fixed_point_stops_after_one_pass():
    data, state = state_for([[0, 0], [0, 2], [2, 0], [2, 2]], [0, 0, 1, 1], 2)
    out, rep = run_lloyd(data, state)
    assert rep.converged and rep.iterations_used == 1 and rep.moves_trace == [0]
    assert out == state
    assert rep.final_loss == 4.0


def test_square_corners_is_a_global_optimum():
    pts = [[0, 0], [0, 2], [2, 0], [2, 2]]
    data, state = state_for(pts, [0, 0, 1, 1], 2)
    out, rep = run_lloyd(data, state)
    assert rep.final_loss == pytest.approx(brute_best_partition(pts, 2))
    assert is_lloyd_stable(data, out) and is_hartigan_stable(data, out)


def test_lloyd_reaches_enumerated_optimum_on_separated_pairs():
    pts = [[0.0], [0.5], [10.0], [10.5], [20.0]]
    data, state = state_for(pts, [0, 1, 0, 1, 0], 2)
    out, rep = run_lloyd(data, state)
    assert rep.converged
    assert rep.final_loss >= brute_best_partition(pts, 2) - 1e-12


def test_lloyd_monotone_on_random_instances(rng):
    for _ in range(200):
        data, state = random_instance(rng, n_max=20, d_max=4, k_max=5)
        _, rep = run_lloyd(data, state)
        assert not nondecreasing_violations(rep.loss_trace)


def test_lloyd_unknown_empty_policy():
    data, s = state_for([[0.0], [1.0]], [0, 1], 2)
    with pytest.raises(ContractError):
        run_lloyd(data, s, empty="drop")


def test_lloyd_keep_lets_a_cluster_empty_out():
    data = Dataset(np.array([[0.0], [0.1], [10.0], [10.1]]))
    # centroid of cluster 2 = 5.05, nearer nobody than clusters 0 and 1
    s = ClusteringState.from_assignment(data, [0, 2, 2, 1], 3)
    out, _ = run_lloyd(data, s, empty="keep")
    assert 0 in out.sizes.tolist()
    out, _ = run_lloyd(data, s, empty="reseed")
    assert 0 not in out.sizes.tolist()


# -- local search -----------------------------------------------------------------------

def test_single_cluster_converges_immediately(rng):
    data = Dataset(rng.normal(size=(30, 3)))
    s = ClusteringState.from_assignment(data, np.zeros(30, dtype=int), 1)
    for run in (run_hartigan, run_smartigan):
        out, rep = run(data, s, seed=1)
        assert rep.converged and rep.moves_trace[-1] == 0
        assert out == s


def tie_config():
    # x = (2, 0) in cluster 0 = {(-2,0), (2,0)}, mu_0 = (0,0); cluster 1 = {(3,0), (5,0)}, mu_1 = (4,0)
    return state_for([[2, 0], [-2, 0], [3, 0], [5, 0]], [0, 0, 1, 1], 2)


def test_tie_lloyd_stays_hartigan_moves():
    data, s = tie_config()
    # equidistant: Lloyd keeps x where it is
    out, rep = run_lloyd(data, s)
    assert rep.moves_trace == [0] and is_lloyd_stable(data, out)
    assert not is_hartigan_stable(data, s)
    out, rep = run_hartigan(data, s, seed=0)
    assert out.assignment[0] == 1
    assert rep.final_loss < rep.initial_loss
    assert rep.initial_loss == 10.0
    assert rep.final_loss == pytest.approx(42 / 9)


def test_local_search_determinism(rng):
    data, s = random_instance(rng, n_max=40, k_max=6)
    for run in (run_hartigan, run_smartigan):
        a = run(data, s, seed=123)
        b = run(data, s, seed=123)
        assert a[0] == b[0]
        assert a[1].loss_trace == b[1].loss_trace and a[1].moves_trace == b[1].moves_trace


def test_local_search_does_not_mutate_initial(rng):
    data, s = random_instance(rng)
    before = s.copy()
    run_smartigan(data, s, seed=3)
    assert s == before


def test_hartigan_monotone_and_stable(rng):
    for seed in range(200):
        data, s = random_instance(rng, n_max=20, k_max=5)
        out, rep = run_hartigan(data, s, seed=seed)
        assert not nondecreasing_violations(rep.loss_trace)
        assert rep.converged
        assert set(rep.multiplier_trace) <= {1.0}
        assert rep.final_loss == pytest.approx(total_loss(data, out), rel=1e-9, abs=1e-12)


def test_stability_chain_and_strict_containment(rng):
    lloyd_not_hartigan = 0
    for seed in range(200):
        data, s = random_instance(rng, n_max=20, k_max=5)
        out, _ = run_hartigan(data, s, seed=seed)
        assert is_hartigan_stable(data, out)
        assert is_lloyd_stable(data, out)
        lo, rep = run_lloyd(data, s)
        if rep.converged and not is_hartigan_stable(data, lo):
            lloyd_not_hartigan += 1
    assert lloyd_not_hartigan >= 1


def test_smartigan_explores_then_recovers():
    data = Dataset(RandomStream(0).standard_normal((200, 2)))
    s = init_random_assignment(data, 10, seed=5)
    found = False
    for seed in range(20):
        _, rep = run_smartigan(data, s, seed=seed)
        tr = rep.loss_trace
        rises = [t for t in range(1, len(tr)) if tr[t] > tr[t - 1]]
        if rises and tr[-1] <= tr[0]:
            found = True
            break
    assert found


def test_smartigan_star_ends_hartigan_stable(rng):
    for seed in range(50):
        data, s = random_instance(rng, n_max=20, k_max=5)
        out, rep = run_smartigan(data, s, seed=seed, finish_with_hartigan=True)
        assert rep.algorithm == "smartigan_star"
        assert rep.converged
        assert rep.multiplier_trace[-1] == 1.0
        assert is_hartigan_stable(data, out)


def test_smartigan_without_finish_respects_horizon(rng):
    data, s = random_instance(rng, n_max=20, k_max=5)
    _, rep = run_smartigan(data, s, max_iterations=3, seed=0, finish_with_hartigan=False)
    assert rep.algorithm == "smartigan"
    assert rep.iterations_used <= 3 and rep.finish_iterations == 0
    assert rep.multiplier_trace == [1.5, 1.5 - 1 / 6, 1.5 - 2 / 6][: rep.iterations_used]


def test_zero_horizon_runs_no_epochs(rng):
    data, s = random_instance(rng)
    for run in (run_hartigan, run_smartigan):
        out, rep = run(data, s, 0, seed=1)
        assert out == s and rep.iterations_used == 0 and rep.finish_iterations == 0


def test_config_finishes():
    assert not LocalSearchConfig(ScheduleSpec.hartigan()).finishes
    assert LocalSearchConfig(ScheduleSpec.smartigan()).finishes
    assert not LocalSearchConfig(ScheduleSpec.smartigan(), finish_with_hartigan=False).finishes


def test_same_stream_gives_same_first_epoch():
    data = Dataset(RandomStream(1).standard_normal((60, 2)))
    s = init_random_assignment(data, 4, seed=2)
    _, h = run_local_search(data, s, LocalSearchConfig(ScheduleSpec.hartigan()), RandomStream(8, (1,)))
    _, g = run_local_search(data, s, LocalSearchConfig(ScheduleSpec.hartigan()), RandomStream(8, (1,)))
    assert h.seed == g.seed and h.moves_trace == g.moves_trace


def test_reported_loss_is_total_loss_of_state(rng):
    for seed in range(100):
        data, s = random_instance(rng, n_max=30, k_max=5)
        for run in (run_hartigan, run_smartigan):
            out, rep = run(data, s, seed=seed)
            assert rep.final_loss == pytest.approx(total_loss(data, out), rel=1e-12, abs=1e-300)
        out, rep = run_lloyd(data, s)
        assert rep.final_loss == pytest.approx(total_loss(data, out), rel=1e-12, abs=1e-300)
