"""Comparison schemes: conflict-agnostic greedy selection and fully
digital precoding.

The greedy baseline gives every user its individually best beam with no
coordination, so two users may end up on the same beam (a beam conflict)
and the equivalent channel loses rank.  Fully digital precoding skips
the analog stage entirely and serves as the performance upper bound.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .channel import FreqChannel
from .codebook import Codebook
from .params import SystemParams
from .precoding import regularized_gram_inverse_times
from .selection import AnalogPrecoder


class SchemeId(str, Enum):
    PROPOSED = "proposed"
    GREEDY = "greedy"
    FULLY_DIGITAL = "fully_digital"


def greedy_select(table: np.ndarray, codebook: Codebook) -> AnalogPrecoder:
    """Per-user argmax beam from the unthresholded IF-rate table.

    Ties break toward the lowest codeword index.  Duplicate selections
    are allowed; that is exactly the failure mode this baseline models.
    """
    table = np.asarray(table, dtype=float)
    selected = tuple(int(i) for i in np.argmax(table, axis=1))
    return AnalogPrecoder(matrix=codebook.matrix[:, list(selected)], selected=selected)


def fully_digital(
    channel: FreqChannel, params: SystemParams, criterion: str = "mmse"
) -> np.ndarray:
    """Per-subcarrier unconstrained precoders, shape (K, N, U).

    ZF inverts H[k] directly (with the same ridge fallback used by the
    hybrid path); MMSE regularizes by the noise level.  Columns are
    scaled to unit norm so each precoder carries squared Frobenius norm
    equal to the user count.
    """
    if criterion not in ("zf", "mmse"):
        raise ValueError(f"criterion must be 'zf' or 'mmse', got {criterion!r}")
    n_k, n_users, n_ant = channel.matrices.shape
    out = np.empty((n_k, n_ant, n_users), dtype=complex)
    for k in range(n_k):
        h = channel.matrices[k]
        if criterion == "zf":
            raw, _ = regularized_gram_inverse_times(h)
        else:
            a = params.per_stream_power * (h @ h.conj().T)
            a = a + params.noise_var * np.eye(n_users)
            raw = np.linalg.solve(a, h).conj().T
        norms = np.linalg.norm(raw, axis=0)
        if np.any(norms < 1e-300):
            bad = np.flatnonzero(norms < 1e-300) + 1
            raise ValueError(
                f"fully digital precoder column(s) {bad.tolist()} vanish on "
                f"subcarrier {k}"
            )
        out[k] = raw / norms[None, :]
    return out
