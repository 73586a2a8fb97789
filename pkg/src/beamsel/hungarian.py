"""Exact solver for the square linear assignment problem.

Shortest-augmenting-path formulation of the Hungarian method with row
and column potentials, O(n^3).  Ties are broken deterministically: rows
enter in ascending order and the lowest-index column is preferred, so
the returned assignment is reproducible across runs and platforms.
"""

from __future__ import annotations

import numpy as np


def hungarian_solve(cost: np.ndarray) -> np.ndarray:
    """Return perm with perm[row] = column, minimizing sum cost[row, perm[row]].

    The minimum is exact (not approximate).  Input must be a square
    matrix of finite reals.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix entries must be finite")
    n = cost.shape[0]

    # assigned_row[c] is the row matched to column c; column n is virtual
    # and temporarily holds the row being inserted.
    assigned_row = np.full(n + 1, -1, dtype=int)
    row_pot = np.zeros(n)
    col_pot = np.zeros(n + 1)

    for row in range(n):
        col = n
        assigned_row[col] = row
        min_slack = np.full(n + 1, np.inf)
        prev_col = np.full(n + 1, -1, dtype=int)
        in_tree = np.zeros(n + 1, dtype=bool)

        while assigned_row[col] != -1:
            in_tree[col] = True
            r = assigned_row[col]
            slack = cost[r, :] - row_pot[r] - col_pot[:n]
            better = ~in_tree[:n] & (slack < min_slack[:n])
            min_slack[:n][better] = slack[better]
            prev_col[:n][better] = col

            reachable = np.where(in_tree[:n], np.inf, min_slack[:n])
            nxt = int(np.argmin(reachable))
            delta = reachable[nxt]

            tree_cols = np.flatnonzero(in_tree)
            row_pot[assigned_row[tree_cols]] += delta
            col_pot[tree_cols] -= delta
            min_slack[~in_tree] -= delta
            col = nxt

        while col != n:
            assigned_row[col] = assigned_row[prev_col[col]]
            col = prev_col[col]

    perm = np.empty(n, dtype=int)
    perm[assigned_row[:n]] = np.arange(n)
    return perm


def assignment_cost(cost: np.ndarray, perm: np.ndarray) -> float:
    """Total cost of an assignment, summed in row order."""
    return float(sum(cost[i, perm[i]] for i in range(len(perm))))
