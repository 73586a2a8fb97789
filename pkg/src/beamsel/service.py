"""HTTP service wrapping the simulator.

Endpoints:
    GET  /health    liveness and version
    POST /sweep     run a Monte Carlo sweep, return the result rows
    POST /trial     run one trial, optionally with debug table dumps
    POST /selftest  run the built-in oracle suites

Requests mirror the flat configuration keys; responses carry the
provenance triple (version, config hash, master seed) alongside the
numeric results so any output can be traced back to its inputs.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import __version__, selftest
from .baselines import SchemeId
from .channel import draw_paths, tap_channel, to_frequency, trial_rng
from .codebook import cached_codebook
from .config import ConfigError, build_sweep_config, resolve
from .experiment import SweepConfig, run_sweep, run_trial
from .output import format_assignment, format_real_matrix, format_tap_dump
from .params import hash_mapping
from .precoding import design_hybrid
from .selection import build_cost_matrix, if_rate_table, preprocess, select_codewords


class SweepRequest(BaseModel):
    """Sweep specification; fields mirror the flat configuration keys."""

    model_config = ConfigDict(extra="forbid")

    axis: Literal["snr_db", "n_users"] = "snr_db"
    antennas: int = 128
    users: int = 16
    rf_chains: int = 16
    subcarriers: int = 16
    taps: int = 4
    paths: int = 4
    path_loss: float = 0.25
    sampling_period_s: float = 1.0 / 1.76e9
    noise_var: float = 1.0
    spacing_ratio: float = 0.5
    strong_path_var: float = 1.0
    weak_path_var: float = 0.1
    snr_db: list[float] = Field(default=[0, 2, 4, 6, 8, 10, 12, 14])
    user_counts: list[int] = Field(default_factory=list)
    schemes: list[str] = Field(default=["proposed", "greedy", "fully_digital"])
    criterion: Literal["zf", "mmse"] = "mmse"
    candidates: int = 4
    trials: int = 2000
    seed: int = 1
    workers: int = 1

    def to_sweep_config(self) -> SweepConfig:
        values = resolve(
            overrides={
                "antennas": str(self.antennas),
                "users": str(self.users),
                "rf_chains": str(self.rf_chains),
                "subcarriers": str(self.subcarriers),
                "taps": str(self.taps),
                "paths": str(self.paths),
                "path_loss": repr(self.path_loss),
                "sampling_period_s": repr(self.sampling_period_s),
                "noise_var": repr(self.noise_var),
                "spacing_ratio": repr(self.spacing_ratio),
                "strong_path_var": repr(self.strong_path_var),
                "weak_path_var": repr(self.weak_path_var),
                "snr_db": ",".join(repr(v) for v in self.snr_db),
                "user_counts": ",".join(str(u) for u in self.user_counts),
                "schemes": ",".join(self.schemes),
                "criterion": self.criterion,
                "candidates": str(self.candidates),
                "trials": str(self.trials),
                "seed": str(self.seed),
                "workers": str(self.workers),
            }
        )
        return build_sweep_config(values, axis=self.axis)


class ResultRowModel(BaseModel):
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


class SweepResponse(BaseModel):
    version: str
    config_hash: str
    master_seed: int
    config: dict[str, str]
    rows: list[ResultRowModel]


class TrialRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    antennas: int = 128
    users: int = 16
    rf_chains: int = 16
    subcarriers: int = 16
    taps: int = 4
    paths: int = 4
    path_loss: float = 0.25
    sampling_period_s: float = 1.0 / 1.76e9
    noise_var: float = 1.0
    spacing_ratio: float = 0.5
    strong_path_var: float = 1.0
    weak_path_var: float = 0.1
    snr_db: float = 14.0
    scheme: Literal["proposed", "greedy", "fully_digital"] = "proposed"
    criterion: Literal["zf", "mmse"] = "mmse"
    candidates: int = 4
    seed: int = 1
    trial_index: int = 0
    include_debug: bool = False


class DebugPayload(BaseModel):
    cost_matrix: str
    preprocessed: str
    assignment: str
    composite_power: str
    taps: str


class TrialResponse(BaseModel):
    version: str
    params_hash: str
    sum_rate: float
    design_time_s: float
    per_user_mean_rate: list[float]
    selected_codewords: list[int] | None
    beam_conflict: bool
    degenerate_subcarriers: list[int]
    debug: DebugPayload | None = None


class SuiteModel(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    version: str
    passed: bool
    suites: list[SuiteModel]


app = FastAPI(
    title="beamsel",
    description="Beam selection and hybrid precoding simulation service",
    version=__version__,
)


@app.get("/health")
def health() -> dict[str, str]:
    return {"status": "ok", "version": __version__}


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    try:
        config = request.to_sweep_config()
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    table = run_sweep(config)
    return SweepResponse(
        version=table.version,
        config_hash=table.config_hash,
        master_seed=table.master_seed,
        config=config.to_mapping(),
        rows=[ResultRowModel(**row.__dict__) for row in table.rows],
    )


def _trial_params(request: TrialRequest):
    values = resolve(
        overrides={
            "antennas": str(request.antennas),
            "users": str(request.users),
            "rf_chains": str(request.rf_chains),
            "subcarriers": str(request.subcarriers),
            "taps": str(request.taps),
            "paths": str(request.paths),
            "path_loss": repr(request.path_loss),
            "sampling_period_s": repr(request.sampling_period_s),
            "noise_var": repr(request.noise_var),
            "spacing_ratio": repr(request.spacing_ratio),
            "strong_path_var": repr(request.strong_path_var),
            "weak_path_var": repr(request.weak_path_var),
            "snr_db": repr(request.snr_db),
            "seed": str(request.seed),
            "candidates": str(request.candidates),
            "criterion": request.criterion,
        }
    )
    config = build_sweep_config(values)
    return config.params.with_snr_db(request.snr_db)


@app.post("/trial", response_model=TrialResponse)
def trial(request: TrialRequest) -> TrialResponse:
    try:
        params = _trial_params(request)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    rng = trial_rng(request.seed, request.trial_index)
    try:
        result = run_trial(
            params,
            SchemeId(request.scheme),
            rng,
            request.criterion,
            request.candidates,
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))

    debug = None
    if request.include_debug:
        debug = _debug_payload(params, request)

    per_user = result.report.per_user_per_subcarrier.mean(axis=1)
    return TrialResponse(
        version=__version__,
        params_hash=hash_mapping(params.to_mapping()),
        sum_rate=result.sum_rate,
        design_time_s=result.design_time_s,
        per_user_mean_rate=[float(v) for v in per_user],
        selected_codewords=(
            [n + 1 for n in result.selected] if result.selected is not None else None
        ),
        beam_conflict=result.beam_conflict,
        degenerate_subcarriers=list(result.degenerate_subcarriers),
        debug=debug,
    )


def _debug_payload(params, request: TrialRequest) -> DebugPayload:
    """Re-run the selection pipeline step by step and render each stage."""
    rng = trial_rng(request.seed, request.trial_index)
    taps = tap_channel(draw_paths(params, rng), params)
    channel = to_frequency(taps, params)
    codebook = cached_codebook(params.n_antennas, params.spacing_ratio)
    table = if_rate_table(channel, codebook, params)
    cost = build_cost_matrix(table, request.candidates)
    pre = preprocess(cost)
    assignment, analog = select_codewords(channel, codebook, params, request.candidates)
    precoder = design_hybrid(channel, analog, params, request.criterion)
    powers = np.array(
        [
            float(np.linalg.norm(analog.matrix @ precoder.digital[k]) ** 2)
            for k in range(params.n_subcarriers)
        ]
    )
    return DebugPayload(
        cost_matrix=format_real_matrix(
            cost.values, "thresholded IF-rate matrix T (rows=users, cols=codewords)"
        ),
        preprocessed=format_real_matrix(
            pre.square,
            "square assignment cost (original codeword columns: "
            + " ".join(str(c + 1) for c in pre.column_map)
            + ")",
        ),
        assignment=format_assignment(assignment.selected, params.n_antennas),
        composite_power=format_real_matrix(
            powers[None, :], "per-subcarrier squared Frobenius norm of the composite"
        ),
        taps=format_tap_dump(
            taps.taps,
            hash_mapping(params.to_mapping()),
            request.seed,
            request.trial_index,
        ),
    )


@app.post("/selftest", response_model=SelftestResponse)
def run_selftest() -> SelftestResponse:
    suites = selftest.run_all()
    return SelftestResponse(
        version=__version__,
        passed=all(s.passed for s in suites),
        suites=[SuiteModel(**s.__dict__) for s in suites],
    )
