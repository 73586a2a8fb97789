"""Scalar system constants shared by every stage of the simulator."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass


@dataclass(frozen=True)
class SystemParams:
    """Model constants for one simulated downlink configuration.

    Powers are linear (not dB).  ``total_power`` is the transmit power
    spread uniformly over all subcarriers and users, so the per-stream
    share is ``total_power / (n_subcarriers * n_users)``.  ``path_loss``
    may be a scalar (applied to every user) or one value per user.
    """

    n_antennas: int = 128
    n_users: int = 16
    n_rf_chains: int = 16
    n_subcarriers: int = 16
    n_taps: int = 4
    n_paths: int = 4
    path_loss: float | tuple[float, ...] = 0.25
    sampling_period: float = 1.0 / 1.76e9
    total_power: float = 1.0
    noise_var: float = 1.0
    spacing_ratio: float = 0.5
    strong_path_var: float = 1.0
    weak_path_var: float = 0.1
    master_seed: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.path_loss, (int, float)):
            betas = (float(self.path_loss),) * self.n_users
        else:
            betas = tuple(float(b) for b in self.path_loss)
        object.__setattr__(self, "path_loss", betas)
        self._validate()

    def _validate(self) -> None:
        if self.n_users < 1:
            raise ValueError("n_users must be at least 1")
        if self.n_rf_chains < self.n_users:
            raise ValueError(
                f"n_rf_chains ({self.n_rf_chains}) must be >= n_users ({self.n_users})"
            )
        if self.n_antennas < self.n_rf_chains:
            raise ValueError(
                f"n_antennas ({self.n_antennas}) must be >= n_rf_chains ({self.n_rf_chains})"
            )
        if self.n_subcarriers < 1:
            raise ValueError("n_subcarriers must be at least 1")
        if self.n_taps < 1:
            raise ValueError("n_taps must be at least 1")
        if self.n_subcarriers < self.n_taps:
            raise ValueError(
                f"n_subcarriers ({self.n_subcarriers}) must be >= n_taps "
                f"({self.n_taps}); the tap sequence cannot be longer than one "
                "OFDM symbol"
            )
        if self.n_paths < 1:
            raise ValueError("n_paths must be at least 1")
        if len(self.path_loss) != self.n_users:
            raise ValueError(
                f"path_loss needs one value per user ({self.n_users}), got "
                f"{len(self.path_loss)}"
            )
        if any(b <= 0 for b in self.path_loss):
            raise ValueError("path_loss values must be positive")
        if self.sampling_period <= 0:
            raise ValueError("sampling_period must be positive")
        if self.total_power <= 0:
            raise ValueError("total_power must be positive")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        if self.spacing_ratio <= 0:
            raise ValueError("spacing_ratio must be positive")
        if self.strong_path_var <= 0 or self.weak_path_var <= 0:
            raise ValueError("path gain variances must be positive")

    @property
    def per_stream_power(self) -> float:
        """Transmit power per (subcarrier, user) stream."""
        return self.total_power / (self.n_subcarriers * self.n_users)

    def beta(self, user: int) -> float:
        return self.path_loss[user]

    def with_snr_db(self, snr_db: float) -> "SystemParams":
        """Return a copy whose total power realizes the given downlink SNR.

        SNR is defined as total_power / (n_users * noise_var).
        """
        rho = 10.0 ** (snr_db / 10.0) * self.n_users * self.noise_var
        return dataclasses.replace(self, total_power=rho)

    def with_users(self, n_users: int) -> "SystemParams":
        """Return a copy serving ``n_users`` users (path loss re-broadcast)."""
        beta0 = self.path_loss[0]
        if any(b != beta0 for b in self.path_loss):
            raise ValueError("cannot change n_users with per-user path_loss values")
        return dataclasses.replace(self, n_users=n_users, path_loss=beta0)

    def to_mapping(self) -> dict[str, str]:
        """Flat, canonically formatted key/value view (hashing, dumps)."""
        betas = ",".join(repr(b) for b in self.path_loss)
        return {
            "antennas": str(self.n_antennas),
            "users": str(self.n_users),
            "rf_chains": str(self.n_rf_chains),
            "subcarriers": str(self.n_subcarriers),
            "taps": str(self.n_taps),
            "paths": str(self.n_paths),
            "path_loss": betas,
            "sampling_period_s": repr(self.sampling_period),
            "total_power": repr(self.total_power),
            "noise_var": repr(self.noise_var),
            "spacing_ratio": repr(self.spacing_ratio),
            "strong_path_var": repr(self.strong_path_var),
            "weak_path_var": repr(self.weak_path_var),
            "master_seed": str(self.master_seed),
        }


def hash_mapping(mapping: dict[str, str]) -> str:
    """Short stable hash of a flat string mapping (sorted key=value lines)."""
    canon = "\n".join(f"{k}={mapping[k]}" for k in sorted(mapping))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]
