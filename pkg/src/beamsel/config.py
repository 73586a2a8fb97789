"""Flat key=value configuration files and sweep-config resolution.

Config files hold one ``key = value`` pair per line; ``#`` starts a
comment.  Command-line flags override file values, which override the
defaults below (the standard large-array OFDM setup: 128 antennas, 16
users and RF chains, 16 subcarriers, 4 taps, 4 paths, path loss 0.25,
sampling period 1/1.76 GHz, 4 candidate codewords, MMSE, 2000 trials).
"""

from __future__ import annotations

from pathlib import Path

from .baselines import SchemeId
from .experiment import SweepConfig
from .params import SystemParams


class ConfigError(ValueError):
    """A configuration problem with a user-facing diagnostic."""


DEFAULTS: dict[str, str] = {
    "antennas": "128",
    "users": "16",
    "rf_chains": "16",
    "subcarriers": "16",
    "taps": "4",
    "paths": "4",
    "path_loss": "0.25",
    "sampling_period_s": repr(1.0 / 1.76e9),
    "noise_var": "1.0",
    "spacing_ratio": "0.5",
    "strong_path_var": "1.0",
    "weak_path_var": "0.1",
    "snr_db": "0,2,4,6,8,10,12,14",
    "user_counts": "",
    "schemes": "proposed,greedy,fully_digital",
    "criterion": "mmse",
    "candidates": "4",
    "trials": "2000",
    "seed": "1",
    "workers": "1",
}

_INT_KEYS = {
    "antennas",
    "users",
    "rf_chains",
    "subcarriers",
    "taps",
    "paths",
    "candidates",
    "trials",
    "seed",
    "workers",
}
_FLOAT_KEYS = {
    "path_loss",
    "sampling_period_s",
    "noise_var",
    "spacing_ratio",
    "strong_path_var",
    "weak_path_var",
}


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat config file, rejecting unknown keys and bad syntax."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"{path}:{lineno}: expected 'key = value', got {raw!r}"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(
                f"{path}:{lineno}: unknown configuration key {key!r}"
            )
        values[key] = value.strip()
    return values


def _coerce(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"configuration key {key!r} needs {kind}, got {raw!r}")
    return raw


def _float_list(key: str, raw: str) -> tuple[float, ...]:
    if not raw.strip():
        return ()
    try:
        return tuple(float(v) for v in raw.split(","))
    except ValueError:
        raise ConfigError(f"configuration key {key!r} needs comma-separated numbers")


def _int_list(key: str, raw: str) -> tuple[int, ...]:
    if not raw.strip():
        return ()
    try:
        return tuple(int(v) for v in raw.split(","))
    except ValueError:
        raise ConfigError(f"configuration key {key!r} needs comma-separated integers")


def resolve(
    file_values: dict[str, str] | None = None,
    overrides: dict[str, str] | None = None,
) -> dict[str, str]:
    """Merge defaults, file values, and flag overrides (highest priority)."""
    merged = dict(DEFAULTS)
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown configuration key {key!r}")
            if value is not None:
                merged[key] = str(value)
    return merged


def build_sweep_config(values: dict[str, str], axis: str = "snr_db") -> SweepConfig:
    """Validated SweepConfig from a fully resolved flat mapping."""
    scalars = {k: _coerce(k, values[k]) for k in _INT_KEYS | _FLOAT_KEYS}
    if scalars["users"] > scalars["rf_chains"]:
        raise ConfigError(
            f"users ({scalars['users']}) cannot exceed rf_chains "
            f"({scalars['rf_chains']})"
        )
    if scalars["subcarriers"] < scalars["taps"]:
        raise ConfigError(
            f"subcarriers ({scalars['subcarriers']}) must be at least the tap "
            f"count ({scalars['taps']})"
        )
    scheme_names = [s.strip() for s in values["schemes"].split(",") if s.strip()]
    try:
        schemes = tuple(SchemeId(s) for s in scheme_names)
    except ValueError:
        valid = ", ".join(s.value for s in SchemeId)
        raise ConfigError(
            f"unknown scheme in {values['schemes']!r}; valid schemes: {valid}"
        )
    criterion = values["criterion"].lower()
    if criterion not in ("zf", "mmse"):
        raise ConfigError(
            f"criterion must be 'zf' or 'mmse', got {values['criterion']!r}"
        )
    try:
        params = SystemParams(
            n_antennas=scalars["antennas"],
            n_users=scalars["users"],
            n_rf_chains=scalars["rf_chains"],
            n_subcarriers=scalars["subcarriers"],
            n_taps=scalars["taps"],
            n_paths=scalars["paths"],
            path_loss=scalars["path_loss"],
            sampling_period=scalars["sampling_period_s"],
            noise_var=scalars["noise_var"],
            spacing_ratio=scalars["spacing_ratio"],
            strong_path_var=scalars["strong_path_var"],
            weak_path_var=scalars["weak_path_var"],
            master_seed=scalars["seed"],
        )
        return SweepConfig(
            params=params,
            axis=axis,
            snr_db=_float_list("snr_db", values["snr_db"]),
            user_counts=_int_list("user_counts", values["user_counts"]),
            schemes=schemes,
            criterion=criterion,
            n_candidates=scalars["candidates"],
            n_trials=scalars["trials"],
            master_seed=scalars["seed"],
            n_workers=scalars["workers"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
