"""Exact maximum-weight bipartite matching for batched allocation.

``max_weight_matching`` runs an O(n^3) potentials-based Hungarian method on
an internally padded square gain matrix. Only edges with strictly positive
weight are admissible (callers map non-positive benefit to Forbidden anyway),
and rows may stay unmatched. ``brute_force_matching`` is the independent
enumeration oracle for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import TooLargeError

_BRUTE_FORCE_MAX_ROWS = 8


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Rectangular weight matrix with a forbidden-edge mask."""

    weights: np.ndarray
    forbidden: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        f = np.asarray(self.forbidden, dtype=bool)
        if w.ndim != 2 or w.shape != f.shape:
            raise ValueError("weights and forbidden must be equal-shape 2-D arrays")
        if not np.all(np.isfinite(w[~f])):
            raise ValueError("admitted weights must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "forbidden", f)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Optional[float]]]) -> "WeightMatrix":
        """Build from nested lists where None marks a forbidden edge."""
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        weights = np.zeros((n_rows, n_cols))
        forbidden = np.zeros((n_rows, n_cols), dtype=bool)
        for i, row in enumerate(rows):
            if len(row) != n_cols:
                raise ValueError("ragged weight rows")
            for j, value in enumerate(row):
                if value is None:
                    forbidden[i, j] = True
                else:
                    weights[i, j] = float(value)
        return cls(weights, forbidden)

    @property
    def n_rows(self) -> int:
        return self.weights.shape[0]

    @property
    def n_cols(self) -> int:
        return self.weights.shape[1]

    def admissible(self) -> np.ndarray:
        """Edges that can appear in a matching: allowed and positive-weight."""
        return (~self.forbidden) & (self.weights > 0.0)


def matching_total(matrix: WeightMatrix, pairs: Set[Tuple[int, int]]) -> float:
    return float(sum(matrix.weights[i, j] for i, j in pairs))


def max_weight_matching(matrix: WeightMatrix) -> Set[Tuple[int, int]]:
    """Maximum-total-weight matching over admissible edges.

    Empty and all-forbidden inputs give the empty matching.
    """
    r, c = matrix.n_rows, matrix.n_cols
    if r == 0 or c == 0:
        return set()
    admissible = matrix.admissible()
    if not admissible.any():
        return set()
    # With r rows, an optimum only ever needs each row's r best admissible
    # columns: any row matched outside its top r can swap to an unused one of
    # them without losing weight. Keeps the padded square small when the
    # column side is a whole waitlist.
    cols = _candidate_columns(matrix.weights, admissible)
    sub_adm = admissible[:, cols]
    n = max(r, len(cols))
    gain = np.zeros((n, n))
    # Inadmissible cells carry zero gain, so assigning a row there is the
    # same as leaving it unmatched.
    gain[:r, : len(cols)] = np.where(sub_adm, matrix.weights[:, cols], 0.0)
    assignment = _hungarian_min_cost(-gain)
    pairs = set()
    for i in range(r):
        j = assignment[i]
        if j < len(cols) and sub_adm[i, j]:
            pairs.add((i, int(cols[j])))
    return pairs


def _candidate_columns(weights: np.ndarray, admissible: np.ndarray) -> np.ndarray:
    """Union over rows of each row's top-n_rows admissible columns."""
    r, c = weights.shape
    if c <= r:
        return np.arange(c)
    keep = set()
    for i in range(r):
        row = np.where(admissible[i], weights[i], -np.inf)
        for j in np.argpartition(-row, r - 1)[:r]:
            if admissible[i, j]:
                keep.add(int(j))
    return np.array(sorted(keep), dtype=int)


def _hungarian_min_cost(cost: np.ndarray) -> List[int]:
    """Potentials-based Kuhn-Munkres on a square cost matrix.

    Returns the column assigned to each row of a minimum-cost perfect
    assignment.
    """
    n = cost.shape[0]
    inf = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    col_row = [0] * (n + 1)  # col_row[j]: 1-based row matched to column j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        col_row[0] = i
        j0 = 0
        min_slack = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = col_row[j0]
            delta = inf
            j1 = 0
            row_cost = cost[i0 - 1]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row_cost[j - 1] - u[i0] - v[j]
                if cur < min_slack[j]:
                    min_slack[j] = cur
                    way[j] = j0
                if min_slack[j] < delta:
                    delta = min_slack[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[col_row[j]] += delta
                    v[j] -= delta
                else:
                    min_slack[j] -= delta
            j0 = j1
            if col_row[j0] == 0:
                break
        while j0:
            col_row[j0] = col_row[way[j0]]
            j0 = way[j0]
    assignment = [0] * n
    for j in range(1, n + 1):
        if col_row[j]:
            assignment[col_row[j] - 1] = j - 1
    return assignment


def brute_force_matching(matrix: WeightMatrix) -> Set[Tuple[int, int]]:
    """Exact optimum by enumerating all matchings; oracle for small inputs."""
    r, c = matrix.n_rows, matrix.n_cols
    if r > _BRUTE_FORCE_MAX_ROWS:
        raise TooLargeError(f"brute force capped at {_BRUTE_FORCE_MAX_ROWS} rows, got {r}")
    admissible = matrix.admissible()
    row_options = [
        [(j, matrix.weights[i, j]) for j in range(c) if admissible[i, j]] for i in range(r)
    ]

    def explore(i: int, used_cols: int) -> Tuple[float, Tuple[Tuple[int, int], ...]]:
        if i == r:
            return 0.0, ()
        best_total, best_pairs = explore(i + 1, used_cols)  # leave row i unmatched
        for j, w in row_options[i]:
            if used_cols & (1 << j):
                continue
            total, pairs = explore(i + 1, used_cols | (1 << j))
            total += w
            if total > best_total:
                best_total, best_pairs = total, ((i, j),) + pairs
        return best_total, best_pairs

    _, pairs = explore(0, 0)
    return set(pairs)


def sequential_greedy_matching(matrix: WeightMatrix) -> Set[Tuple[int, int]]:
    """Rows in order take their best remaining admissible column.

    The baseline a batched matching is measured against; ties go to the
    lowest column index.
    """
    admissible = matrix.admissible()
    taken = np.zeros(matrix.n_cols, dtype=bool)
    pairs = set()
    for i in range(matrix.n_rows):
        best_j = -1
        best_w = 0.0
        for j in range(matrix.n_cols):
            if taken[j] or not admissible[i, j]:
                continue
            if matrix.weights[i, j] > best_w:
                best_w = matrix.weights[i, j]
                best_j = j
        if best_j >= 0:
            taken[best_j] = True
            pairs.add((i, best_j))
    return pairs
