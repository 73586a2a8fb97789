import numpy as np
import pytest

from beamsel.channel import FreqChannel, draw_paths, tap_channel, to_frequency
from beamsel.params import SystemParams


def make_params(**overrides) -> SystemParams:
    """Small desk-scale parameter set; override anything per test."""
    base = dict(
        n_antennas=16,
        n_users=4,
        n_rf_chains=4,
        n_subcarriers=8,
        n_taps=4,
        n_paths=4,
        total_power=64.0,
        noise_var=1.0,
    )
    base.update(overrides)
    return SystemParams(**base)


def model_channel(params: SystemParams, rng: np.random.Generator) -> FreqChannel:
    """One realization of the geometric channel model."""
    return to_frequency(tap_channel(draw_paths(params, rng), params), params)


def gaussian_channel(
    n_subcarriers: int, n_users: int, n_antennas: int, rng: np.random.Generator
) -> FreqChannel:
    """Unstructured complex Gaussian channel (shape tests, oracles)."""
    shape = (n_subcarriers, n_users, n_antennas)
    return FreqChannel(matrices=rng.normal(size=shape) + 1j * rng.normal(size=shape))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(987654321)
