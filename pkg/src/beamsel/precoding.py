"""Per-subcarrier digital precoding behind a fixed analog precoder.

The digital stage sees the equivalent channel H_e[k] = H[k] F_RF and
inverts it per subcarrier:

    ZF:   F = H_e^H (H_e H_e^H)^(-1)
    MMSE: F = H_e^H ((p) H_e H_e^H + noise_var * I)^(-1),  p = total_power/(K*U)

Each digital column is then scaled so the composite column F_RF f_BB^u
has unit norm, which makes ||F_RF F_BB[k]||_F^2 equal the user count on
every subcarrier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import FreqChannel
from .params import SystemParams
from .selection import AnalogPrecoder

# A Gram matrix whose smallest singular value is below RCOND times the
# largest is treated as rank deficient and ridge-regularized.
RCOND = 1e-10
RIDGE = 1e-12


@dataclass(frozen=True)
class EquivalentChannel:
    """H[k] F_RF for every subcarrier; ``matrices`` is (K, U, U)."""

    matrices: np.ndarray


@dataclass(frozen=True)
class HybridPrecoder:
    """Frequency-flat analog precoder plus one digital matrix per subcarrier.

    ``digital`` is (K, U, U) and already column-normalized, so every
    composite satisfies the transmit power constraint.
    ``degenerate_subcarriers`` lists subcarriers where the equivalent
    channel was rank deficient and the inverse had to be regularized.
    """

    analog: AnalogPrecoder
    digital: np.ndarray
    degenerate_subcarriers: tuple[int, ...] = ()

    def composites(self) -> np.ndarray:
        """Composite precoders F_RF F_BB[k], shape (K, N, U)."""
        return np.matmul(self.analog.matrix[None, :, :], self.digital)


def equivalent_channel(
    channel: FreqChannel, analog: AnalogPrecoder
) -> EquivalentChannel:
    """Project the channel onto the analog beams, per subcarrier."""
    if channel.matrices.shape[2] != analog.matrix.shape[0]:
        raise ValueError(
            f"channel has {channel.matrices.shape[2]} antennas, analog precoder "
            f"{analog.matrix.shape[0]}"
        )
    return EquivalentChannel(matrices=np.matmul(channel.matrices, analog.matrix))


def regularized_gram_inverse_times(matrix: np.ndarray) -> tuple[np.ndarray, bool]:
    """Compute M^H (M M^H)^(-1) with a ridge fallback for rank deficiency.

    Returns the product and a flag marking whether regularization was
    applied.  The ridge is RIDGE times the squared largest singular
    value, which leaves well-conditioned inputs untouched.
    """
    sv = np.linalg.svd(matrix, compute_uv=False)
    gram = matrix @ matrix.conj().T
    degenerate = bool(sv[-1] <= RCOND * sv[0])
    if degenerate:
        eps = RIDGE * sv[0] ** 2
        if eps == 0.0:
            eps = np.finfo(float).tiny
        gram = gram + eps * np.eye(gram.shape[0])
    return np.linalg.solve(gram, matrix).conj().T, degenerate


def zf_digital(
    equiv_k: np.ndarray, params: SystemParams
) -> tuple[np.ndarray, bool]:
    """Zero-forcing digital precoder (pre-normalization) and degeneracy flag."""
    return regularized_gram_inverse_times(equiv_k)


def mmse_digital(equiv_k: np.ndarray, params: SystemParams) -> np.ndarray:
    """MMSE digital precoder (pre-normalization); always well defined."""
    n_users = equiv_k.shape[0]
    a = params.per_stream_power * (equiv_k @ equiv_k.conj().T)
    a = a + params.noise_var * np.eye(n_users)
    return np.linalg.solve(a, equiv_k).conj().T


def normalize_columns(
    analog: AnalogPrecoder, digital_raw: np.ndarray, k: int | None = None
) -> np.ndarray:
    """Scale each digital column so its composite column has unit norm."""
    composite = analog.matrix @ digital_raw
    norms = np.linalg.norm(composite, axis=0)
    if np.any(norms < 1e-300):
        bad = np.flatnonzero(norms < 1e-300) + 1
        where = f" on subcarrier {k}" if k is not None else ""
        raise ValueError(
            f"composite precoder column(s) {bad.tolist()} vanish{where}; "
            "the corresponding user(s) cannot be served"
        )
    return digital_raw / norms[None, :]


def design_hybrid(
    channel: FreqChannel,
    analog: AnalogPrecoder,
    params: SystemParams,
    criterion: str = "mmse",
) -> HybridPrecoder:
    """Digital precoders for every subcarrier under the given criterion."""
    if criterion not in ("zf", "mmse"):
        raise ValueError(f"criterion must be 'zf' or 'mmse', got {criterion!r}")
    equiv = equivalent_channel(channel, analog)
    n_k, n_users = equiv.matrices.shape[0], equiv.matrices.shape[1]
    digital = np.empty((n_k, n_users, n_users), dtype=complex)
    degenerate: list[int] = []
    for k in range(n_k):
        if criterion == "zf":
            raw, flag = zf_digital(equiv.matrices[k], params)
            if flag:
                degenerate.append(k)
        else:
            raw = mmse_digital(equiv.matrices[k], params)
        digital[k] = normalize_columns(analog, raw, k)
    return HybridPrecoder(
        analog=analog, digital=digital, degenerate_subcarriers=tuple(degenerate)
    )
