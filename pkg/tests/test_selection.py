import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamsel.channel import FreqChannel
from beamsel.codebook import dft_codebook
from beamsel.hungarian import hungarian_solve
from beamsel.rate import if_rate
from beamsel.selection import (
    CostMatrix,
    build_cost_matrix,
    if_rate_table,
    preprocess,
    select_codewords,
    threshold_gamma,
)

from conftest import gaussian_channel, make_params


def brute_force_best(table: np.ndarray) -> float:
    """Max total utility over injective user -> codeword maps."""
    n_users, n_cw = table.shape
    rows = np.arange(n_users)
    return max(
        float(table[rows, list(perm)].sum())
        for perm in itertools.permutations(range(n_cw), n_users)
    )


def small_instance(rng, max_users=5, max_codewords=10):
    n_users = int(rng.integers(1, max_users + 1))
    n_cw = int(rng.integers(max(n_users, 2), max_codewords + 1))
    params = make_params(
        n_antennas=n_cw,
        n_users=n_users,
        n_rf_chains=n_users,
        n_subcarriers=2,
        n_taps=2,
    )
    channel = gaussian_channel(2, n_users, n_cw, rng)
    return params, channel, dft_codebook(n_cw)


# -------------------------------------------------------------- if_rate_table


def test_if_rate_table_single_entry_reduces_to_if_rate(rng):
    params = make_params(n_users=1, n_rf_chains=1, n_subcarriers=1, n_taps=1)
    channel = gaussian_channel(1, 1, params.n_antennas, rng)
    cb = dft_codebook(params.n_antennas)
    table = if_rate_table(channel, cb, params)
    for n in range(params.n_antennas):
        assert table[0, n] == pytest.approx(
            if_rate(channel.matrices[0, 0], cb.codeword(n), params), abs=1e-12
        )


def test_if_rate_table_zero_row(rng):
    params = make_params(n_users=2, n_rf_chains=2)
    mats = gaussian_channel(
        params.n_subcarriers, 2, params.n_antennas, rng
    ).matrices.copy()
    mats[:, 1, :] = 0.0
    table = if_rate_table(FreqChannel(matrices=mats), dft_codebook(16), params)
    assert np.all(table[1] == 0.0)
    assert np.all(table[0] >= 0.0)


def test_if_rate_table_matches_triple_loop(rng):
    # Oracle: direct per-(user, codeword, subcarrier) summation.
    params = make_params(n_antennas=8, n_users=3, n_rf_chains=3, n_subcarriers=4)
    channel = gaussian_channel(4, 3, 8, rng)
    cb = dft_codebook(8)
    table = if_rate_table(channel, cb, params)
    for u in range(3):
        for n in range(8):
            acc = 0.0
            for k in range(4):
                acc += if_rate(channel.matrices[k, u], cb.codeword(n), params)
            assert table[u, n] == pytest.approx(acc / 4.0, abs=1e-12)


def test_if_rate_table_rejects_antenna_mismatch(rng):
    params = make_params()
    channel = gaussian_channel(2, 2, 8, rng)
    with pytest.raises(ValueError):
        if_rate_table(channel, dft_codebook(16), params)


# ------------------------------------------------------------ threshold_gamma


def test_threshold_examples():
    assert threshold_gamma(np.array([2.0, 3.0, 1.0, 4.0]), 2) == 3.0
    assert threshold_gamma(np.array([5.0, 5.0, 5.0, 5.0]), 2) == 5.0


def test_threshold_rejects_out_of_range():
    row = np.arange(4.0)
    with pytest.raises(ValueError):
        threshold_gamma(row, 5)
    with pytest.raises(ValueError):
        threshold_gamma(row, 1)  # fewer than two candidates
    assert threshold_gamma(row, 1, allow_single=True) == 3.0


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    n=st.integers(min_value=2, max_value=40),
)
def test_threshold_matches_sort_oracle(seed, n):
    rng = np.random.default_rng(seed)
    row = rng.uniform(0.0, 10.0, size=n)
    m = int(rng.integers(2, n + 1))
    expected = float(np.sort(row)[::-1][m - 1])
    assert threshold_gamma(row, m) == expected


# ----------------------------------------------------------- build_cost_matrix


def test_build_cost_matrix_examples():
    table = np.array([[2.0, 3.0, 1.0, 4.0]])
    cost = build_cost_matrix(table, 2)
    np.testing.assert_array_equal(cost.values, [[0.0, 3.0, 0.0, 4.0]])
    assert cost.thresholds[0] == 3.0

    table = np.array([[1.0, 5.0, 4.0, 2.0]])
    cost = build_cost_matrix(table, 4)
    np.testing.assert_array_equal(cost.values, table)


def test_build_cost_matrix_keeps_threshold_ties():
    # Oracle: the literal keep-if-at-least-threshold rule applied per entry.
    table = np.array([[5.0, 5.0, 5.0, 5.0]])
    cost = build_cost_matrix(table, 2)

    def literal_keep(x, y):
        return x if x >= y else 0.0

    expected = np.array(
        [[literal_keep(v, cost.thresholds[0]) for v in table[0]]]
    )
    np.testing.assert_array_equal(cost.values, expected)
    assert np.count_nonzero(cost.values) == 4  # ties can exceed M_u


def test_build_cost_matrix_per_user_counts():
    table = np.array([[2.0, 3.0, 1.0, 4.0], [1.0, 5.0, 4.0, 2.0]])
    cost = build_cost_matrix(table, [2, 3])
    np.testing.assert_array_equal(
        cost.values, [[0.0, 3.0, 0.0, 4.0], [0.0, 5.0, 4.0, 2.0]]
    )
    with pytest.raises(ValueError):
        build_cost_matrix(table, [2])


def test_build_cost_matrix_rows_keep_at_least_m(rng):
    for _ in range(50):
        table = rng.uniform(0.0, 10.0, size=(4, 9))
        cost = build_cost_matrix(table, 3)
        assert np.all(np.count_nonzero(cost.values, axis=1) >= 3)
        nz = cost.values[cost.values > 0.0]
        assert np.all(nz >= np.min(cost.thresholds))


# ------------------------------------------------------------------ preprocess


def _cost(values, m=None):
    values = np.asarray(values, dtype=float)
    counts = (2,) * values.shape[0] if m is None else m
    return CostMatrix(
        values=values, thresholds=np.zeros(values.shape[0]), candidate_counts=counts
    )


def test_preprocess_worked_example():
    # Hand-applied reduction of [[0,3,0,4],[0,0,7,6]]: keep columns 2..4
    # (1-based), flip against the max entry 7, pad with one zero row.
    pre = preprocess(_cost([[0.0, 3.0, 0.0, 4.0], [0.0, 0.0, 7.0, 6.0]]))
    np.testing.assert_array_equal(pre.column_map, [1, 2, 3])
    assert pre.n_padding == 1
    np.testing.assert_array_equal(
        pre.square,
        [[4.0, 7.0, 3.0], [7.0, 0.0, 1.0], [0.0, 0.0, 0.0]],
    )


def test_preprocess_square_input_no_padding():
    pre = preprocess(_cost([[1.0, 2.0], [3.0, 4.0]]))
    assert pre.n_padding == 0
    np.testing.assert_array_equal(pre.column_map, [0, 1])
    np.testing.assert_array_equal(pre.square, [[3.0, 2.0], [1.0, 0.0]])


def test_preprocess_all_zero_recovers_columns():
    pre = preprocess(_cost(np.zeros((2, 4))))
    np.testing.assert_array_equal(pre.column_map, [0, 1])
    assert pre.n_padding == 0
    np.testing.assert_array_equal(pre.square, np.zeros((2, 2)))
    assert list(hungarian_solve(pre.square)) == [0, 1]


def test_preprocess_partial_zero_recovery():
    # Only one nonzero column for two users: one removed zero column must
    # come back (the lowest original index).
    pre = preprocess(_cost([[0.0, 5.0, 0.0], [0.0, 4.0, 0.0]]))
    np.testing.assert_array_equal(pre.column_map, [0, 1])
    assert pre.n_padding == 0


def test_preprocess_rejects_too_few_columns():
    with pytest.raises(ValueError, match="codewords"):
        preprocess(_cost(np.zeros((3, 2))))


# ------------------------------------------------------------ select_codewords


def test_select_no_conflict_equals_argmax(rng):
    # Users whose channels are scaled conjugated codewords: per-user argmax
    # beams are distinct, so coordination cannot improve anything.
    n, n_users = 16, 3
    params = make_params(n_antennas=n, n_users=n_users, n_rf_chains=n_users)
    cb = dft_codebook(n)
    beams = [2, 7, 11]
    mats = np.stack(
        [
            np.stack([(3.0 + u) * cb.codeword(beams[u]).conj() for u in range(n_users)])
            for _ in range(params.n_subcarriers)
        ]
    )
    channel = FreqChannel(matrices=mats)
    assignment, analog = select_codewords(channel, cb, params, 4)
    assert list(assignment.selected) == beams
    table = if_rate_table(channel, cb, params)
    np.testing.assert_array_equal(np.argmax(table, axis=1), beams)
    np.testing.assert_array_equal(analog.matrix, cb.matrix[:, beams])


def test_select_resolves_conflict_on_cost_matrix():
    # Both users prefer column 3 (1-based); the exact assignment gives
    # user 1 -> 3 and user 2 -> 4 for a total of 13, beating 12.
    values = np.array([[0.0, 5.0, 7.0, 0.0], [0.0, 0.0, 7.0, 6.0]])
    pre = preprocess(_cost(values))
    perm = hungarian_solve(pre.square)
    selected = [int(pre.column_map[perm[u]]) for u in range(2)]
    assert selected == [2, 3]
    total = values[0, selected[0]] + values[1, selected[1]]
    assert total == 13.0
    assert total == brute_force_best(values)


def test_select_single_user_takes_argmax(rng):
    params, channel, cb = small_instance(rng, max_users=1)
    assignment, _ = select_codewords(channel, cb, params, params.n_antennas)
    table = if_rate_table(channel, cb, params)
    assert assignment.selected[0] == int(np.argmax(table[0]))


def test_select_end_to_end_matches_brute_force(rng):
    # Unpruned (M = N) selection must reach the exhaustive optimum exactly.
    for _ in range(40):
        params, channel, cb = small_instance(rng)
        assignment, _ = select_codewords(channel, cb, params, params.n_antennas)
        table = build_cost_matrix(
            if_rate_table(channel, cb, params), params.n_antennas
        ).values
        achieved = float(
            table[np.arange(params.n_users), list(assignment.selected)].sum()
        )
        assert achieved == pytest.approx(brute_force_best(table), abs=1e-12)


@pytest.mark.filterwarnings("ignore::UserWarning")  # starvation is legal here
def test_select_is_conflict_free(rng):
    for _ in range(20):
        params, channel, cb = small_instance(rng)
        assignment, analog = select_codewords(channel, cb, params, 2)
        assert len(set(assignment.selected)) == params.n_users
        assert not analog.has_conflict
        p = assignment.as_matrix(params.n_antennas)
        assert np.all(p.sum(axis=1) == 1)
        assert np.all(p.sum(axis=0) <= 1)


def test_thresholded_selection_still_optimal_on_kept_entries(rng):
    # Max-min duality on the thresholded matrix: the pipeline objective on
    # T equals the brute-force maximum of sum T(u, n) P(u, n).
    for _ in range(25):
        rng_local = rng
        n_users = int(rng_local.integers(2, 5))
        n_cw = int(rng_local.integers(n_users + 1, 9))
        table = rng_local.uniform(0.0, 10.0, size=(n_users, n_cw))
        cost = build_cost_matrix(table, 2)
        pre = preprocess(cost)
        perm = hungarian_solve(pre.square)
        selected = [int(pre.column_map[perm[u]]) for u in range(n_users)]
        achieved = float(cost.values[np.arange(n_users), selected].sum())
        assert achieved == pytest.approx(brute_force_best(cost.values), abs=1e-12)


def test_scale_invariance_of_optimal_assignment(rng):
    # Scaling the utility matrix by c > 0 scales the optimum by c and keeps
    # the argmax set; checked against brute force on both scales.
    table = rng.uniform(0.0, 5.0, size=(3, 6))
    cost = build_cost_matrix(table, 3)
    for c in (0.25, 7.0):
        scaled = CostMatrix(
            values=c * cost.values,
            thresholds=c * cost.thresholds,
            candidate_counts=cost.candidate_counts,
        )
        pre = preprocess(scaled)
        perm = hungarian_solve(pre.square)
        selected = [int(pre.column_map[perm[u]]) for u in range(3)]
        achieved = float(scaled.values[np.arange(3), selected].sum())
        assert achieved == pytest.approx(c * brute_force_best(cost.values), rel=1e-12)


def test_select_warns_for_unservable_user(rng):
    params = make_params(n_users=2, n_rf_chains=2)
    mats = gaussian_channel(
        params.n_subcarriers, 2, params.n_antennas, rng
    ).matrices.copy()
    mats[:, 1, :] = 0.0
    channel = FreqChannel(matrices=mats)
    with pytest.warns(UserWarning, match="user 2"):
        assignment, _ = select_codewords(channel, dft_codebook(16), params, 4)
    assert len(set(assignment.selected)) == 2
