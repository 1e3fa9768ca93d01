import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smartigan.core import (
    ClusteringState,
    ContractError,
    Dataset,
    ScheduleSpec,
    delta_decrease,
    fill_empty_clusters,
    insertion_cost,
    move_point,
    phi,
    removal_gain,
    total_loss,
)

from conftest import brute_phi, members, random_instance


def state_for(points, assignment, k):
    data = Dataset(np.asarray(points, dtype=float))
    return data, ClusteringState.from_assignment(data, assignment, k)


# -- Dataset / ClusteringState ------------------------------------------------

def test_dataset_rejects_bad_input():
    with pytest.raises(ContractError):
        Dataset(np.empty((0, 2)))
    with pytest.raises(ContractError):
        Dataset([[0.0, np.nan]])
    with pytest.raises(ContractError):
        Dataset([[0.0, 1.0]], labels=[0, 1])


def test_dataset_is_read_only():
    data = Dataset([[0.0, 1.0], [2.0, 3.0]], labels=[0, 1])
    with pytest.raises(ValueError):
        data.points[0, 0] = 5.0
    assert (data.n, data.d) == (2, 2)


def test_state_rejects_bad_assignment():
    data = Dataset([[0.0], [1.0], [2.0]])
    with pytest.raises(ContractError):
        ClusteringState.from_assignment(data, [0, 1, 3], 3)
    with pytest.raises(ContractError):
        ClusteringState.from_assignment(data, [0, 1], 2)
    with pytest.raises(ContractError):
        ClusteringState.from_assignment(data, [0, 0, 0], 4)


def test_dimension_mismatch_is_contract_violation():
    data, state = state_for([[0, 0], [2, 0]], [0, 0], 1)
    other = Dataset([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]])
    with pytest.raises(ContractError):
        total_loss(other, state)


# -- total_loss / phi -----------------------------------------------------------

def test_total_loss_symmetric_pair():
    data, state = state_for([[0, 0], [2, 0]], [0, 0], 1)
    assert total_loss(data, state) == 2.0


def test_total_loss_each_point_own_cluster(rng):
    pts = rng.normal(size=(7, 3))
    data, state = state_for(pts, np.arange(7), 7)
    assert total_loss(data, state) == 0.0


def test_total_loss_does_not_mutate(rng):
    data, state = random_instance(rng)
    before = state.copy()
    total_loss(data, state)
    assert state == before


def test_phi_examples(rng):
    data, state = state_for([[0, 0], [2, 0], [9, 9]], [0, 0, 1], 2)
    assert phi(data, state, 0) == 2.0
    assert phi(data, state, 1) == 0.0
    pts = rng.normal(size=(10, 3))
    data, state = state_for(pts, np.zeros(10, dtype=int), 1)
    assert phi(data, state, 0) == pytest.approx(brute_phi(pts), rel=1e-12)


def test_phi_empty_cluster_and_range():
    data, state = state_for([[0.0], [1.0]], [0, 0], 2)
    assert phi(data, state, 1) == 0.0
    with pytest.raises(IndexError):
        phi(data, state, 2)


def test_loss_decomposes_into_phi(rng):
    for _ in range(200):
        data, state = random_instance(rng)
        parts = sum(phi(data, state, j) for j in range(state.k))
        assert total_loss(data, state) == pytest.approx(parts, rel=1e-9, abs=1e-12)


# -- insertion / removal / delta --------------------------------------------------

def test_insertion_cost_examples():
    # target cluster {(0,0)}, point at squared distance 4
    data, state = state_for([[0, 0], [2, 0], [5, 5]], [0, 1, 1], 2)
    assert insertion_cost(data, state, 1, 0) == 2.0
    # point sitting on the target centroid
    data, state = state_for([[1, 0], [-1, 0], [0, 0], [0, 0]], [0, 0, 1, 1], 2)
    assert insertion_cost(data, state, 2, 0) == 0.0


def test_insertion_into_empty_cluster_is_free():
    data, state = state_for([[0.0], [1.0], [2.0]], [0, 0, 0], 2)
    assert insertion_cost(data, state, 1, 1) == 0.0


def test_removal_gain_examples():
    data, state = state_for([[1, 0], [-1, 0]], [0, 0], 1)
    assert removal_gain(data, state, 0) == 2.0
    data, state = state_for([[1, 0], [-1, 0], [0, 0]], [0, 0, 0], 1)
    assert removal_gain(data, state, 2) == 0.0


def test_removal_from_singleton_rejected():
    data, state = state_for([[0.0], [5.0], [6.0]], [0, 1, 1], 2)
    with pytest.raises(ContractError):
        removal_gain(data, state, 0)
    with pytest.raises(ContractError):
        delta_decrease(data, state, 0, 1)


def test_delta_target_equals_source_rejected():
    data, state = state_for([[0.0], [5.0], [6.0]], [0, 1, 1], 2)
    with pytest.raises(ContractError):
        delta_decrease(data, state, 1, 1)


def test_delta_examples():
    # x = (3, 0) sits exactly on mu(S_j) = (3, 0); mu(S_i) = (1, 0), |S_i| = 3
    data, state = state_for([[3, 0], [0, 0], [0, 0], [2, 0], [4, 0]], [0, 0, 0, 1, 1], 2)
    assert delta_decrease(data, state, 0, 1) == pytest.approx(3 / 2 * 4.0)
    # x on its own centroid: only the insertion cost remains
    data, state = state_for([[1, 0], [-1, 0], [0, 0], [4, 0], [6, 0]], [0, 0, 0, 1, 1], 2)
    assert delta_decrease(data, state, 2, 1) == pytest.approx(-2 / 3 * 25.0)


def _four_phi_oracle(data, state, i, j):
    r = state.assignment[i]
    src = members(data, state.assignment, r)
    dst = members(data, state.assignment, j)
    src_after = [data.points[m] for m in range(data.n) if state.assignment[m] == r and m != i]
    before = brute_phi(src) + brute_phi(dst)
    after = brute_phi(src_after) + brute_phi(dst + [data.points[i]])
    return before - after, max(1.0, before, after)


def _valid_moves(rng, state):
    cands = [i for i in range(state.n) if state.sizes[state.assignment[i]] >= 2]
    if not cands or state.k < 2:
        return None
    i = int(rng.choice(cands))
    j = int(rng.choice([c for c in range(state.k) if c != state.assignment[i]]))
    return i, j


def test_delta_matches_four_phi_oracle(rng):
    checked = 0
    while checked < 1000:
        data, state = random_instance(rng)
        mv = _valid_moves(rng, state)
        if mv is None:
            continue
        i, j = mv
        want, scale = _four_phi_oracle(data, state, i, j)
        assert abs(delta_decrease(data, state, i, j) - want) <= 1e-9 * scale
        checked += 1


def test_insertion_and_removal_match_phi_oracle(rng):
    for _ in range(300):
        data, state = random_instance(rng, n_min=3)
        mv = _valid_moves(rng, state)
        if mv is None:
            continue
        i, j = mv
        r = state.assignment[i]
        dst = members(data, state.assignment, j)
        ins = brute_phi(dst + [data.points[i]]) - brute_phi(dst)
        src = members(data, state.assignment, r)
        src_after = [data.points[m] for m in range(data.n) if state.assignment[m] == r and m != i]
        rem = brute_phi(src) - brute_phi(src_after)
        scale = max(1.0, brute_phi(src), brute_phi(dst + [data.points[i]]))
        assert abs(insertion_cost(data, state, i, j) - ins) <= 1e-9 * scale
        assert abs(removal_gain(data, state, i) - rem) <= 1e-9 * scale


# -- move_point ---------------------------------------------------------------------

def test_move_from_two_point_cluster():
    data, state = state_for([[0.0], [1.0], [5.0]], [0, 0, 1], 2)
    move_point(data, state, 1, 1)
    assert state.sizes.tolist() == [1, 2]
    assert state.assignment.tolist() == [0, 1, 1]


def test_move_and_back_is_identity(rng):
    for _ in range(100):
        data, state = random_instance(rng)
        mv = _valid_moves(rng, state)
        if mv is None:
            continue
        i, j = mv
        orig = state.copy()
        r = state.assignment[i]
        move_point(data, state, i, j)
        move_point(data, state, i, r)
        assert np.array_equal(state.assignment, orig.assignment)
        assert np.array_equal(state.sizes, orig.sizes)
        np.testing.assert_allclose(state.centroid_sums, orig.centroid_sums, rtol=0, atol=1e-12)


def test_move_changes_loss_by_delta(rng):
    for _ in range(500):
        data, state = random_instance(rng)
        mv = _valid_moves(rng, state)
        if mv is None:
            continue
        i, j = mv
        before = total_loss(data, state)
        delta = delta_decrease(data, state, i, j)
        move_point(data, state, i, j)
        after = total_loss(data, state)
        assert abs((before - after) - delta) <= 1e-9 * max(1.0, before)


def test_random_move_sequences_keep_sums_exact(rng):
    for _ in range(500):
        data, state = random_instance(rng, n_max=15)
        if state.k < 2:
            continue
        for _ in range(int(rng.integers(1, 30))):
            i = int(rng.integers(data.n))
            j = int(rng.integers(state.k))
            if j != state.assignment[i]:
                move_point(data, state, i, j)
        state.check(data)
        for c in range(state.k):
            want = np.sum([data.points[m] for m in range(data.n) if state.assignment[m] == c], axis=0)
            if state.sizes[c]:
                np.testing.assert_allclose(state.centroid_sums[c], want, rtol=1e-9, atol=1e-9)


def test_fill_empty_clusters_uses_farthest_point():
    data, state = state_for([[0.0], [1.0], [10.0], [11.0], [30.0]], [0, 0, 1, 1, 1], 3)
    assert fill_empty_clusters(data, state) == 1
    assert state.assignment[4] == 2
    assert state.sizes.min() == 1


# -- schedule -----------------------------------------------------------------------

def test_schedule_values():
    s = ScheduleSpec.smartigan(100)
    assert s.multiplier(0) == 1.5
    assert s.multiplier(50) == 1.25
    assert s.multiplier(100) == 1.0
    assert s.multiplier(250) == 1.0
    assert ScheduleSpec.hartigan(10).multiplier(3) == 1.0
    with pytest.raises(ContractError):
        ScheduleSpec("cosine", 10)
    with pytest.raises(ContractError):
        ScheduleSpec("linear_decay", -1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10_000), st.sampled_from(["constant_one", "linear_decay"]), st.data())
def test_schedule_monotone_and_at_least_one(n_max, kind, draw):
    s = ScheduleSpec(kind, n_max)
    t = draw.draw(st.integers(0, n_max))
    assert s.multiplier(t) >= 1.0
    assert s.multiplier(t + 1) <= s.multiplier(t)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nonnegativity(seed):
    rng = np.random.default_rng(seed)
    data, state = random_instance(rng)
    assert total_loss(data, state) >= 0
    for j in range(state.k):
        assert phi(data, state, j) >= 0
        assert insertion_cost(data, state, 0, j) >= 0
    if state.sizes[state.assignment[0]] >= 2:
        assert removal_gain(data, state, 0) >= 0
