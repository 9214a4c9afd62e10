"""Maximum-weight bipartite matching against enumeration and greedy baselines."""

import numpy as np
import pytest

from allocsim.errors import TooLargeError
from allocsim.matching import (
    WeightMatrix,
    brute_force_matching,
    matching_total,
    max_weight_matching,
    sequential_greedy_matching,
)


def test_two_by_two_hand_case():
    m = WeightMatrix(np.array([[1.0, 2.0], [3.0, 1.0]]), np.zeros((2, 2), dtype=bool))
    pairs = max_weight_matching(m)
    assert pairs == {(0, 1), (1, 0)}
    assert matching_total(m, pairs) == 5.0


def test_forbidden_and_nonpositive_edges_unused():
    weights = np.array([[5.0, -1.0], [0.0, 4.0]])
    forbidden = np.array([[True, False], [False, False]])
    m = WeightMatrix(weights, forbidden)
    pairs = max_weight_matching(m)
    # (0,0) forbidden, (0,1) negative, (1,0) zero: only (1,1) is admissible
    assert pairs == {(1, 1)}


def test_rows_can_stay_unmatched_for_a_better_total():
    # row 0 would grab column 0 greedily; the optimum gives it up
    weights = np.array([[10.0, 0.0], [9.0, 0.0]])
    m = WeightMatrix(weights, np.zeros((2, 2), dtype=bool))
    pairs = max_weight_matching(m)
    assert matching_total(m, pairs) == 10.0


def test_empty_and_all_forbidden():
    assert max_weight_matching(WeightMatrix(np.zeros((0, 3)), np.zeros((0, 3), dtype=bool))) == set()
    m = WeightMatrix(np.ones((2, 2)), np.ones((2, 2), dtype=bool))
    assert max_weight_matching(m) == set()


def test_from_rows_none_marks_forbidden():
    m = WeightMatrix.from_rows([[1.0, None], [None, 2.0]])
    assert m.forbidden[0, 1] and m.forbidden[1, 0]
    assert max_weight_matching(m) == {(0, 0), (1, 1)}
    with pytest.raises(ValueError):
        WeightMatrix.from_rows([[1.0, 2.0], [3.0]])


def test_matches_brute_force_on_random_instances():
    rng = np.random.Generator(np.random.Philox(19))
    for _ in range(300):
        r = int(rng.integers(1, 7))
        c = int(rng.integers(1, 7))
        weights = rng.uniform(-10.0, 10.0, size=(r, c))
        forbidden = rng.random((r, c)) < 0.25
        m = WeightMatrix(weights, forbidden)
        fast = max_weight_matching(m)
        slow = brute_force_matching(m)
        assert matching_total(m, fast) == pytest.approx(matching_total(m, slow), abs=1e-9)
        # output must itself be a matching over admissible edges
        rows = [i for i, _ in fast]
        cols = [j for _, j in fast]
        assert len(rows) == len(set(rows)) and len(cols) == len(set(cols))
        admissible = m.admissible()
        assert all(admissible[i, j] for i, j in fast)


def test_matches_brute_force_on_wide_instances():
    # the column-reduction path: many more columns than rows
    rng = np.random.Generator(np.random.Philox(29))
    for _ in range(120):
        r = int(rng.integers(1, 6))
        c = int(rng.integers(10, 40))
        weights = rng.uniform(-5.0, 10.0, size=(r, c))
        forbidden = rng.random((r, c)) < 0.3
        m = WeightMatrix(weights, forbidden)
        fast = max_weight_matching(m)
        slow = brute_force_matching(m)
        assert matching_total(m, fast) == pytest.approx(matching_total(m, slow), abs=1e-9)


def test_never_below_sequential_greedy():
    rng = np.random.Generator(np.random.Philox(37))
    for _ in range(200):
        r = int(rng.integers(1, 8))
        c = int(rng.integers(1, 12))
        weights = rng.uniform(-2.0, 8.0, size=(r, c))
        forbidden = rng.random((r, c)) < 0.2
        m = WeightMatrix(weights, forbidden)
        opt = matching_total(m, max_weight_matching(m))
        greedy = matching_total(m, sequential_greedy_matching(m))
        assert opt >= greedy - 1e-9


def test_greedy_takes_rows_in_order():
    weights = np.array([[5.0, 4.0], [9.0, 1.0]])
    m = WeightMatrix(weights, np.zeros((2, 2), dtype=bool))
    greedy = sequential_greedy_matching(m)
    assert greedy == {(0, 0), (1, 1)}  # row 0 claims column 0 first
    assert matching_total(m, greedy) == 6.0
    assert matching_total(m, max_weight_matching(m)) == 13.0


def test_brute_force_size_cap():
    m = WeightMatrix(np.ones((9, 2)), np.zeros((9, 2), dtype=bool))
    with pytest.raises(TooLargeError):
        brute_force_matching(m)


def test_weight_matrix_validation():
    with pytest.raises(ValueError):
        WeightMatrix(np.ones((2, 2)), np.zeros((2, 3), dtype=bool))
    with pytest.raises(ValueError):
        WeightMatrix(np.array([[np.inf, 1.0]]), np.array([[False, False]]))
    # non-finite entries are fine when masked out
    WeightMatrix(np.array([[np.inf, 1.0]]), np.array([[True, False]]))
