"""Achievable-rate evaluation under perfect channel knowledge.

With composite precoder column w_i = F_RF f_BB^i and per-stream power
share p = total_power / (K * U), user u on subcarrier k achieves

    R_u[k] = log2(1 + p*|h_u[k] w_u|^2 / (p * sum_{i != u} |h_u[k] w_i|^2 + noise_var)).

The interference-free (IF) rate drops the other users entirely:

    R_u_IF[k] = log2(1 + total_power * |h_u[k] f|^2 / (K * U * noise_var)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .params import SystemParams

if TYPE_CHECKING:
    from .channel import FreqChannel
    from .precoding import HybridPrecoder


@dataclass(frozen=True)
class RateReport:
    """Per-(user, subcarrier) rates plus their subcarrier-averaged total.

    ``per_user_per_subcarrier`` is (n_users, n_subcarriers) in bits/s/Hz;
    ``sum_rate`` equals its grand total divided by the subcarrier count.
    """

    per_user_per_subcarrier: np.ndarray
    sum_rate: float


def if_rate_from_gain(gain_sq, params: SystemParams):
    """IF rate from the squared beam gain |h f|^2 (scalar or array)."""
    k, u = params.n_subcarriers, params.n_users
    return np.log2(1.0 + params.total_power * gain_sq / (k * u * params.noise_var))


def if_rate(h_u_k: np.ndarray, codeword: np.ndarray, params: SystemParams) -> float:
    """Single-user rate of channel row ``h_u_k`` through analog beam ``codeword``."""
    gain_sq = np.abs(np.dot(h_u_k, codeword)) ** 2
    return float(if_rate_from_gain(gain_sq, params))


def per_user_rate(
    h_u_k: np.ndarray,
    analog: np.ndarray,
    digital_k: np.ndarray,
    u: int,
    params: SystemParams,
) -> float:
    """Rate of user ``u`` on one subcarrier under the hybrid precoder.

    ``analog`` is N x U, ``digital_k`` U x U; interference is summed over
    every other composite column.
    """
    n_users = analog.shape[1]
    if h_u_k.shape != (analog.shape[0],):
        raise ValueError(
            f"channel row has length {h_u_k.shape}, expected ({analog.shape[0]},)"
        )
    if digital_k.shape != (n_users, n_users):
        raise ValueError(
            f"digital precoder has shape {digital_k.shape}, expected "
            f"({n_users}, {n_users})"
        )
    if not 0 <= u < n_users:
        raise ValueError(f"user index {u} out of range for {n_users} users")
    gains = h_u_k @ (analog @ digital_k)
    powers = np.abs(gains) ** 2
    p = params.per_stream_power
    others = np.delete(powers, u)
    sinr = p * powers[u] / (p * others.sum() + params.noise_var)
    return float(np.log2(1.0 + sinr))


def rates_from_composites(
    channel: "FreqChannel", composites: np.ndarray, params: SystemParams
) -> RateReport:
    """Rate report for per-subcarrier composite precoders (K, N, U)."""
    if composites.shape[0] != channel.n_subcarriers:
        raise ValueError(
            f"got {composites.shape[0]} precoders for {channel.n_subcarriers} subcarriers"
        )
    gains = np.matmul(channel.matrices, composites)  # (K, U, U)
    powers = np.abs(gains) ** 2
    signal = np.einsum("kuu->ku", powers).copy()
    off = powers.copy()
    np.einsum("kuu->ku", off)[...] = 0.0
    interference = off.sum(axis=2)
    p = params.per_stream_power
    rates = np.log2(1.0 + p * signal / (p * interference + params.noise_var))
    per_user = rates.T  # (U, K)
    return RateReport(
        per_user_per_subcarrier=per_user,
        sum_rate=float(per_user.sum() / channel.n_subcarriers),
    )


def sum_rate(
    channel: "FreqChannel", precoder: "HybridPrecoder", params: SystemParams
) -> RateReport:
    """Sum-rate of a hybrid precoder over all users and subcarriers."""
    return rates_from_composites(channel, precoder.composites(), params)
