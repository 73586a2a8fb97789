"""Monte Carlo sweeps over SNR or user count with paired channel draws.

Every trial index maps to its own random stream derived from the master
seed, independent of scheme, sweep point, and execution order.  Schemes
at the same trial index therefore see identical channel realizations
(common random numbers), and results are bit-identical no matter how
many workers run the trials.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .baselines import SchemeId, fully_digital, greedy_select
from .channel import FreqChannel, draw_paths, tap_channel, to_frequency, trial_rng
from .codebook import cached_codebook
from .params import SystemParams, hash_mapping
from .precoding import design_hybrid
from .rate import RateReport, rates_from_composites
from .selection import if_rate_table, select_codewords

AXES = ("snr_db", "n_users")


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: a parameter axis, the schemes to compare, and trial count."""

    params: SystemParams
    axis: str = "snr_db"
    snr_db: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0)
    user_counts: tuple[int, ...] = ()
    schemes: tuple[SchemeId, ...] = (
        SchemeId.PROPOSED,
        SchemeId.GREEDY,
        SchemeId.FULLY_DIGITAL,
    )
    criterion: str = "mmse"
    n_candidates: int = 4
    n_trials: int = 2000
    master_seed: int = 1
    n_workers: int = 1

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if self.criterion not in ("zf", "mmse"):
            raise ValueError(f"criterion must be 'zf' or 'mmse', got {self.criterion!r}")
        if self.n_workers < 1:
            raise ValueError("n_workers must be at least 1")
        if not all(np.isfinite(v) for v in self.snr_db):
            raise ValueError("snr_db values must be finite")
        if self.axis == "snr_db":
            if not self.snr_db:
                raise ValueError("snr_db axis requires at least one SNR value")
        else:
            if not self.user_counts:
                raise ValueError("n_users axis requires at least one user count")
            if len(self.snr_db) != 1:
                raise ValueError(
                    "a user-count sweep needs exactly one snr_db value, got "
                    f"{len(self.snr_db)}"
                )
            for u in self.user_counts:
                if not 1 <= u <= self.params.n_rf_chains:
                    raise ValueError(
                        f"swept user count {u} must lie in [1, n_rf_chains="
                        f"{self.params.n_rf_chains}]"
                    )

    def axis_values(self) -> tuple[float, ...]:
        if self.axis == "snr_db":
            return tuple(float(v) for v in self.snr_db)
        return tuple(float(u) for u in self.user_counts)

    def params_at(self, axis_value: float) -> SystemParams:
        """System parameters for one sweep point (power follows the SNR)."""
        if self.axis == "snr_db":
            return self.params.with_snr_db(axis_value)
        return self.params.with_users(int(axis_value)).with_snr_db(self.snr_db[0])

    def to_mapping(self) -> dict[str, str]:
        """Canonical flat view used for the provenance hash.

        Worker count is excluded: it cannot change any result.
        """
        mapping = self.params.to_mapping()
        mapping.update(
            {
                "axis": self.axis,
                "snr_db": ",".join(repr(v) for v in self.snr_db),
                "user_counts": ",".join(str(u) for u in self.user_counts),
                "schemes": ",".join(s.value for s in self.schemes),
                "criterion": self.criterion,
                "candidates": str(self.n_candidates),
                "trials": str(self.n_trials),
                "seed": str(self.master_seed),
            }
        )
        return mapping

    def config_hash(self) -> str:
        return hash_mapping(self.to_mapping())


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one channel realization under one scheme."""

    sum_rate: float
    design_time_s: float
    report: RateReport
    selected: tuple[int, ...] | None
    beam_conflict: bool
    degenerate_subcarriers: tuple[int, ...] = ()


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    axis_name: str
    axis_value: float
    mean_sum_rate: float
    stderr: float
    mean_per_user_rate: float
    median_design_time_s: float
    n_trials: int
    n_failures: int
    seed: int


@dataclass(frozen=True)
class ResultTable:
    rows: tuple[ResultRow, ...]
    config_hash: str
    master_seed: int
    version: str = __version__


def generate_channel(params: SystemParams, rng: np.random.Generator) -> FreqChannel:
    """One channel realization: paths -> taps -> per-subcarrier response."""
    return to_frequency(tap_channel(draw_paths(params, rng), params), params)


def run_trial(
    params: SystemParams,
    scheme: SchemeId,
    rng: np.random.Generator,
    criterion: str = "mmse",
    n_candidates: int = 4,
) -> TrialResult:
    """One Monte Carlo trial.

    The design timer covers codeword selection and digital precoding
    only; channel generation and rate evaluation are excluded.
    """
    scheme = SchemeId(scheme)
    channel = generate_channel(params, rng)
    codebook = cached_codebook(params.n_antennas, params.spacing_ratio)

    start = time.perf_counter()
    if scheme is SchemeId.PROPOSED:
        _, analog = select_codewords(channel, codebook, params, n_candidates)
        precoder = design_hybrid(channel, analog, params, criterion)
        composites = precoder.composites()
        selected = analog.selected
        conflict = False
        degenerate = precoder.degenerate_subcarriers
    elif scheme is SchemeId.GREEDY:
        table = if_rate_table(channel, codebook, params)
        analog = greedy_select(table, codebook)
        precoder = design_hybrid(channel, analog, params, criterion)
        composites = precoder.composites()
        selected = analog.selected
        conflict = analog.has_conflict
        degenerate = precoder.degenerate_subcarriers
    else:
        composites = fully_digital(channel, params, criterion)
        selected = None
        conflict = False
        degenerate = ()
    elapsed = time.perf_counter() - start

    report = rates_from_composites(channel, composites, params)
    return TrialResult(
        sum_rate=report.sum_rate,
        design_time_s=elapsed,
        report=report,
        selected=selected,
        beam_conflict=conflict,
        degenerate_subcarriers=degenerate,
    )


@dataclass
class _TrialOutcome:
    result: TrialResult | None = None
    error: str | None = None


def _run_point(
    params: SystemParams, scheme: SchemeId, config: SweepConfig
) -> list[_TrialOutcome]:
    def one(trial: int) -> _TrialOutcome:
        rng = trial_rng(config.master_seed, trial)
        try:
            return _TrialOutcome(
                result=run_trial(
                    params, scheme, rng, config.criterion, config.n_candidates
                )
            )
        except Exception as exc:  # recorded, never silently dropped
            return _TrialOutcome(error=f"{type(exc).__name__}: {exc}")

    trials = range(config.n_trials)
    if config.n_workers == 1:
        return [one(t) for t in trials]
    with ThreadPoolExecutor(max_workers=config.n_workers) as pool:
        return list(pool.map(one, trials))


def run_sweep(config: SweepConfig) -> ResultTable:
    """Average every (scheme, sweep point) pair over paired trials."""
    rows = []
    for axis_value in config.axis_values():
        point_params = config.params_at(axis_value)
        for scheme in config.schemes:
            outcomes = _run_point(point_params, scheme, config)
            rates = np.array(
                [o.result.sum_rate for o in outcomes if o.result is not None]
            )
            times = [o.result.design_time_s for o in outcomes if o.result is not None]
            n_failures = sum(1 for o in outcomes if o.result is None)
            mean = float(rates.mean()) if rates.size else float("nan")
            stderr = (
                float(rates.std(ddof=1) / np.sqrt(rates.size))
                if rates.size > 1
                else 0.0
            )
            rows.append(
                ResultRow(
                    scheme=scheme.value,
                    axis_name=config.axis,
                    axis_value=float(axis_value),
                    mean_sum_rate=mean,
                    stderr=stderr,
                    mean_per_user_rate=mean / point_params.n_users,
                    median_design_time_s=statistics.median(times) if times else 0.0,
                    n_trials=config.n_trials,
                    n_failures=n_failures,
                    seed=config.master_seed,
                )
            )
    rows.sort(key=lambda r: (r.scheme, r.axis_value))
    return ResultTable(
        rows=tuple(rows),
        config_hash=config.config_hash(),
        master_seed=config.master_seed,
    )
