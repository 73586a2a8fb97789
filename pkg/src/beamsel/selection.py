"""Conflict-free codeword selection via thresholded assignment.

The selection utility of user u and codeword n is the subcarrier-averaged
IF rate.  Entries below the per-user threshold gamma_u (the M_u-th largest
value in the row) are zeroed, leaving at least M_u candidates per user.
Maximizing the total kept utility over injective user->codeword maps is a
linear assignment problem: drop all-zero columns, flip the sign by
subtracting every entry from the global maximum t, pad with zero rows to a
square matrix, and solve exactly with the Hungarian method.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import FreqChannel
from .codebook import Codebook
from .hungarian import hungarian_solve
from .params import SystemParams
from .rate import if_rate_from_gain


@dataclass(frozen=True)
class CostMatrix:
    """Thresholded utility matrix T (n_users x n_codewords).

    Nonzero entries equal the averaged IF rate and are >= the row's
    threshold; zeros mark non-candidate codewords.
    """

    values: np.ndarray
    thresholds: np.ndarray
    candidate_counts: tuple[int, ...]


@dataclass(frozen=True)
class Preprocessed:
    """Square minimization problem derived from a CostMatrix.

    ``square`` is the (N', N') cost matrix t - T' with ``n_padding``
    all-zero rows appended at the bottom; ``column_map[j]`` is the
    original codeword column behind column j of ``square``.
    """

    square: np.ndarray
    column_map: np.ndarray
    n_padding: int


@dataclass(frozen=True)
class Assignment:
    """One selected codeword per user; indices are 0-based and distinct."""

    selected: tuple[int, ...]

    def as_matrix(self, n_codewords: int) -> np.ndarray:
        p = np.zeros((len(self.selected), n_codewords), dtype=int)
        for u, n in enumerate(self.selected):
            p[u, n] = 1
        return p


@dataclass(frozen=True)
class AnalogPrecoder:
    """Analog precoding matrix (n_antennas x n_users) of selected codewords.

    ``selected`` holds the 0-based codeword column indices; baseline
    schemes may repeat an index, the assignment-based path never does.
    """

    matrix: np.ndarray
    selected: tuple[int, ...]

    @property
    def has_conflict(self) -> bool:
        return len(set(self.selected)) < len(self.selected)


def if_rate_table(
    channel: FreqChannel, codebook: Codebook, params: SystemParams
) -> np.ndarray:
    """Subcarrier-averaged IF rate of every (user, codeword) pair."""
    if channel.matrices.shape[2] != codebook.n_antennas:
        raise ValueError(
            f"channel has {channel.matrices.shape[2]} antennas, codebook "
            f"{codebook.n_antennas}"
        )
    gains = np.matmul(channel.matrices, codebook.matrix)  # (K, U, N)
    rates = if_rate_from_gain(np.abs(gains) ** 2, params)
    return rates.mean(axis=0)


def threshold_gamma(row: np.ndarray, m_u: int, *, allow_single: bool = False) -> float:
    """The m_u-th largest value of ``row`` (duplicates counted).

    At least two candidates per user are required so a user keeps an
    alternative when its best beam conflicts; pass ``allow_single=True``
    to lift that floor in controlled experiments.
    """
    row = np.asarray(row, dtype=float)
    n = row.shape[0]
    if m_u > n:
        raise ValueError(f"m_u ({m_u}) exceeds the row length ({n})")
    floor = 1 if allow_single else min(2, n)
    if m_u < floor:
        raise ValueError(f"m_u must be at least {floor}, got {m_u}")
    return float(np.partition(row, n - m_u)[n - m_u])


def build_cost_matrix(
    table: np.ndarray,
    m: int | Sequence[int],
    *,
    allow_single: bool = False,
) -> CostMatrix:
    """Zero every entry below its row threshold; keep ties at the threshold."""
    table = np.asarray(table, dtype=float)
    n_users, n_codewords = table.shape
    if isinstance(m, int):
        counts = (m,) * n_users
    else:
        counts = tuple(int(v) for v in m)
        if len(counts) != n_users:
            raise ValueError(
                f"need one candidate count per user ({n_users}), got {len(counts)}"
            )
    gammas = np.array(
        [
            threshold_gamma(table[u], counts[u], allow_single=allow_single)
            for u in range(n_users)
        ]
    )
    values = np.where(table >= gammas[:, None], table, 0.0)
    return CostMatrix(values=values, thresholds=gammas, candidate_counts=counts)


def preprocess(cost: CostMatrix) -> Preprocessed:
    """Reduce the thresholded matrix to a square minimization problem.

    All-zero columns are dropped (re-added in ascending original index if
    fewer than n_users columns would remain), entries are replaced by
    t - entry with t the global maximum, and zero rows are appended so
    the matrix is square.
    """
    t_mat = cost.values
    n_users, n_codewords = t_mat.shape
    if n_codewords < n_users:
        raise ValueError(
            f"cannot serve {n_users} users with only {n_codewords} codewords"
        )
    nonzero = np.flatnonzero(t_mat.any(axis=0))
    if nonzero.size < n_users:
        removed = np.flatnonzero(~t_mat.any(axis=0))
        refill = removed[: n_users - nonzero.size]
        kept = np.sort(np.concatenate([nonzero, refill]))
    else:
        kept = nonzero
    reduced = t_mat[:, kept]
    t_max = reduced.max() if reduced.size else 0.0
    flipped = t_max - reduced
    n_prime = kept.size
    n_padding = n_prime - n_users
    square = np.vstack([flipped, np.zeros((n_padding, n_prime))])
    return Preprocessed(square=square, column_map=kept, n_padding=n_padding)


def select_codewords(
    channel: FreqChannel,
    codebook: Codebook,
    params: SystemParams,
    m: int | Sequence[int],
    *,
    allow_single: bool = False,
) -> tuple[Assignment, AnalogPrecoder]:
    """Assign one distinct codeword per user maximizing total kept utility.

    Runs the full pipeline: IF-rate table, thresholding, square reduction,
    exact assignment, and analog precoder assembly.  A user whose entire
    thresholded row is zero still receives a (zero-utility) codeword; a
    warning is emitted since that user cannot be served meaningfully.
    """
    table = if_rate_table(channel, codebook, params)
    cost = build_cost_matrix(table, m, allow_single=allow_single)
    pre = preprocess(cost)
    perm = hungarian_solve(pre.square)
    n_users = table.shape[0]
    selected = tuple(int(pre.column_map[perm[u]]) for u in range(n_users))
    for u, n in enumerate(selected):
        if cost.values[u, n] == 0.0:
            reason = (
                "has no candidate codeword above its threshold"
                if not cost.values[u].any()
                else "lost every candidate codeword to other users"
            )
            warnings.warn(
                f"user {u + 1} {reason}; assigned codeword {n + 1} with zero "
                "selection utility",
                stacklevel=2,
            )
    matrix = codebook.matrix[:, list(selected)]
    assignment = Assignment(selected=selected)
    return assignment, AnalogPrecoder(matrix=matrix, selected=selected)
