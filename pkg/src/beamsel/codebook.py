"""ULA steering vectors and the orthonormal beam codebook.

A uniform linear array with antenna spacing m and wavelength lam has the
steering vector

    a(N, theta)[q] = (1/sqrt(N)) * exp(j*2*pi*(m/lam)*q*sin(theta)),

q = 0..N-1.  The beam codebook places one codeword per antenna on the
angle grid sin(theta_n) = -1 + (2n - 1)/N, n = 1..N; at half-wavelength
spacing (m/lam = 1/2) these N codewords form a unitary matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def steering_vector(
    n_antennas: int, theta: float, spacing_ratio: float = 0.5
) -> np.ndarray:
    """Unit-norm ULA steering vector for departure angle ``theta`` (radians)."""
    if n_antennas < 1:
        raise ValueError("n_antennas must be at least 1")
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    if spacing_ratio <= 0:
        raise ValueError("spacing_ratio must be positive")
    q = np.arange(n_antennas)
    phase = 2.0 * np.pi * spacing_ratio * q * np.sin(theta)
    return np.exp(1j * phase) / np.sqrt(n_antennas)


@dataclass(frozen=True)
class Codebook:
    """The N beam codewords of an N-antenna array, one per grid angle.

    ``matrix`` is N x N with column j holding codeword j+1 (storage is
    0-based, codeword numbering in I/O is 1-based).  ``angles`` are the
    grid angles in radians, strictly increasing.
    """

    matrix: np.ndarray
    angles: np.ndarray
    spacing_ratio: float

    @property
    def n_antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_codewords(self) -> int:
        return self.matrix.shape[1]

    def codeword(self, index: int) -> np.ndarray:
        """Codeword by 0-based column index."""
        return self.matrix[:, index]


def dft_codebook(n_antennas: int, spacing_ratio: float = 0.5) -> Codebook:
    """Build the beam codebook on the grid sin(theta_n) = -1 + (2n-1)/N."""
    if n_antennas < 1:
        raise ValueError("n_antennas must be at least 1")
    n = n_antennas
    sines = -1.0 + (2.0 * np.arange(1, n + 1) - 1.0) / n
    angles = np.arcsin(sines)
    matrix = np.empty((n, n), dtype=complex)
    for j in range(n):
        matrix[:, j] = steering_vector(n, float(angles[j]), spacing_ratio)
    matrix.setflags(write=False)
    angles.setflags(write=False)
    return Codebook(matrix=matrix, angles=angles, spacing_ratio=spacing_ratio)


@lru_cache(maxsize=8)
def cached_codebook(n_antennas: int, spacing_ratio: float = 0.5) -> Codebook:
    """Memoized codebook lookup; construction is pure so sharing is safe."""
    return dft_codebook(n_antennas, spacing_ratio)
