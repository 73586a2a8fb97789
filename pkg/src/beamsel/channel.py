"""Geometric frequency-selective multiuser channel generation.

Each user sees L propagation paths with complex gains alpha, delays tau
and departure angles theta.  The tap-domain channel row of user u at
delay d is

    h_u^(d) = sqrt(N / (L * beta_u)) * sum_l alpha_l * p(d*T_s - tau_l) * a(N, theta_l)^H

and the per-subcarrier response is its K-point DFT over taps,

    h_u[k] = sum_d h_u^(d) * exp(-j*2*pi*k*d/K).

The pulse shape p is a raised cosine with roll-off 1 (see pulse_shape).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import steering_vector
from .params import SystemParams


@dataclass(frozen=True)
class PathSet:
    """Per-user path parameters; arrays are (n_users, n_paths)."""

    gains: np.ndarray
    delays: np.ndarray
    aods: np.ndarray


@dataclass(frozen=True)
class TapChannel:
    """Delay-domain channel; ``taps`` is (n_users, n_taps, n_antennas)."""

    taps: np.ndarray


@dataclass(frozen=True)
class FreqChannel:
    """Per-subcarrier channel; ``matrices`` is (n_subcarriers, n_users, n_antennas)."""

    matrices: np.ndarray

    @property
    def n_subcarriers(self) -> int:
        return self.matrices.shape[0]

    @property
    def n_users(self) -> int:
        return self.matrices.shape[1]


def _pulse_array(tau: np.ndarray, sampling_period: float) -> np.ndarray:
    x = np.asarray(tau, dtype=float) / sampling_period
    denom = 1.0 - (2.0 * x) ** 2
    # Removable singularity at x = +-1/2: cos(pi x)/(1 - 4 x^2) -> pi/4.
    near = np.abs(denom) < 1e-9
    safe = np.where(near, 1.0, denom)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sinc(x) * np.cos(np.pi * x) / safe
    lim = np.sinc(x) * (np.pi / 4.0)
    return np.where(near, lim, val)


def pulse_shape(tau: float, params: SystemParams) -> float:
    """Raised-cosine pulse (roll-off 1) sampled at delay ``tau`` seconds.

    p(0) = 1, p is even, and p(d * T_s) = 0 for every nonzero integer d.
    """
    return float(_pulse_array(np.asarray(tau, dtype=float), params.sampling_period))


def draw_paths(params: SystemParams, rng: np.random.Generator) -> PathSet:
    """Sample one multipath realization for every user.

    The draw order is fixed for reproducibility: for each user, for each
    path, gain (real part then imaginary part), then delay, then angle.
    The first path of each user is the strong one (variance
    ``strong_path_var``); the rest use ``weak_path_var``.  Delays are
    uniform on [0, (n_taps - 1) * T_s], angles uniform on [-pi/2, pi/2).
    """
    n_u, n_l = params.n_users, params.n_paths
    gains = np.empty((n_u, n_l), dtype=complex)
    delays = np.empty((n_u, n_l))
    aods = np.empty((n_u, n_l))
    delay_max = (params.n_taps - 1) * params.sampling_period
    for u in range(n_u):
        for l in range(n_l):
            var = params.strong_path_var if l == 0 else params.weak_path_var
            re = rng.normal()
            im = rng.normal()
            gains[u, l] = np.sqrt(var / 2.0) * (re + 1j * im)
            delays[u, l] = rng.uniform(0.0, delay_max)
            aods[u, l] = rng.uniform(-np.pi / 2.0, np.pi / 2.0)
    return PathSet(gains=gains, delays=delays, aods=aods)


def tap_channel(paths: PathSet, params: SystemParams) -> TapChannel:
    """Evaluate the delay-domain channel rows from a path realization."""
    n_u, n_l = paths.gains.shape
    n, n_c = params.n_antennas, params.n_taps
    d_grid = np.arange(n_c) * params.sampling_period
    taps = np.empty((n_u, n_c, n), dtype=complex)
    for u in range(n_u):
        steer = np.empty((n_l, n), dtype=complex)
        for l in range(n_l):
            steer[l] = steering_vector(n, float(paths.aods[u, l]), params.spacing_ratio)
        pulse = _pulse_array(
            d_grid[:, None] - paths.delays[u][None, :], params.sampling_period
        )
        scale = np.sqrt(n / (n_l * params.beta(u)))
        taps[u] = scale * (pulse * paths.gains[u][None, :]) @ steer.conj()
    return TapChannel(taps=taps)


def to_frequency(taps: TapChannel, params: SystemParams) -> FreqChannel:
    """K-point DFT of the tap sequence for every user and antenna.

    Tap sequences shorter than K are zero padded; K below the tap count
    is rejected (taps would alias across OFDM symbols).
    """
    k = params.n_subcarriers
    if k < 1:
        raise ValueError("n_subcarriers must be at least 1")
    n_c = taps.taps.shape[1]
    if k < n_c:
        raise ValueError(
            f"n_subcarriers ({k}) must be >= n_taps ({n_c})"
        )
    freq = np.fft.fft(taps.taps, n=k, axis=1)
    return FreqChannel(matrices=np.ascontiguousarray(np.swapaxes(freq, 0, 1)))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Independent per-trial random stream, stable across platforms.

    The same (seed, trial) pair always yields the same stream, which is
    what lets schemes and sweep points share channel realizations.
    """
    return np.random.default_rng([master_seed, trial_index])
