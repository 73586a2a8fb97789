"""Fast built-in oracle suites for installed-environment sanity checks.

Each suite re-derives expected values through an independent route
(brute force, direct summation) and checks the production path against
it.  The full test suite is far more thorough; this is the quick check
wired to the ``selftest`` CLI command and service endpoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .channel import FreqChannel, draw_paths, tap_channel, to_frequency, trial_rng
from .codebook import dft_codebook
from .hungarian import assignment_cost, hungarian_solve
from .params import SystemParams
from .precoding import design_hybrid
from .selection import build_cost_matrix, if_rate_table, select_codewords


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def _codebook_orthonormality() -> SuiteResult:
    worst = 0.0
    for n in (2, 3, 16, 64, 128):
        cb = dft_codebook(n)
        gram = cb.matrix.conj().T @ cb.matrix
        worst = max(worst, float(np.max(np.abs(gram - np.eye(n)))))
    passed = worst < 1e-12
    return SuiteResult(
        "codebook_orthonormality", passed, f"max |Gram - I| = {worst:.3e}"
    )


def _hungarian_optimality(seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 7))
        cost = rng.uniform(0.0, 10.0, size=(n, n))
        perm = hungarian_solve(cost)
        got = assignment_cost(cost, perm)
        best = min(
            assignment_cost(cost, p) for p in itertools.permutations(range(n))
        )
        worst = max(worst, abs(got - best))
    passed = worst == 0.0
    return SuiteResult(
        "hungarian_optimality", passed, f"max objective gap = {worst:.3e}"
    )


def _channel_transform(seed: int) -> SuiteResult:
    params = SystemParams(
        n_antennas=8, n_users=2, n_rf_chains=2, n_subcarriers=8, n_taps=3
    )
    worst_dft = 0.0
    worst_parseval = 0.0
    for trial in range(10):
        rng = trial_rng(seed, trial)
        taps = tap_channel(draw_paths(params, rng), params)
        freq = to_frequency(taps, params)
        k_grid = np.arange(params.n_subcarriers)
        for u in range(params.n_users):
            phases = np.exp(
                -2j * np.pi * np.outer(k_grid, np.arange(params.n_taps))
                / params.n_subcarriers
            )
            direct = phases @ taps.taps[u]
            worst_dft = max(
                worst_dft, float(np.max(np.abs(direct - freq.matrices[:, u, :])))
            )
            energy_f = float(np.sum(np.abs(freq.matrices[:, u, :]) ** 2))
            energy_t = params.n_subcarriers * float(np.sum(np.abs(taps.taps[u]) ** 2))
            worst_parseval = max(
                worst_parseval, abs(energy_f - energy_t) / energy_t
            )
    passed = worst_dft < 1e-12 and worst_parseval < 1e-9
    return SuiteResult(
        "channel_transform",
        passed,
        f"max DFT deviation = {worst_dft:.3e}, max Parseval error = "
        f"{worst_parseval:.3e}",
    )


def _zf_nulling(seed: int) -> SuiteResult:
    params = SystemParams(
        n_antennas=16, n_users=4, n_rf_chains=4, n_subcarriers=4, n_taps=4
    ).with_snr_db(14.0)
    cb = dft_codebook(params.n_antennas)
    worst_leak = 0.0
    worst_power = 0.0
    for trial in range(10):
        rng = trial_rng(seed, trial)
        channel = to_frequency(tap_channel(draw_paths(params, rng), params), params)
        _, analog = select_codewords(channel, cb, params, 4)
        precoder = design_hybrid(channel, analog, params, "zf")
        for k in range(params.n_subcarriers):
            comp = analog.matrix @ precoder.digital[k]
            gains = np.abs(channel.matrices[k] @ comp)
            diag = np.diag(gains).copy()
            off = gains - np.diag(diag)
            worst_leak = max(worst_leak, float((off / diag[:, None]).max()))
            worst_power = max(
                worst_power,
                abs(float(np.linalg.norm(comp) ** 2) - params.n_users),
            )
    passed = worst_leak < 1e-9 and worst_power < 1e-9
    return SuiteResult(
        "zf_nulling",
        passed,
        f"max leakage ratio = {worst_leak:.3e}, max power error = {worst_power:.3e}",
    )


def _assignment_pipeline(seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(25):
        n_users = int(rng.integers(1, 5))
        n_cw = int(rng.integers(max(n_users, 2), 9))
        params = SystemParams(
            n_antennas=n_cw,
            n_users=n_users,
            n_rf_chains=n_users,
            n_subcarriers=2,
            n_taps=1,
        )
        h = rng.normal(size=(2, n_users, n_cw)) + 1j * rng.normal(
            size=(2, n_users, n_cw)
        )
        channel = FreqChannel(matrices=h)
        cb = dft_codebook(n_cw)
        assignment, _ = select_codewords(channel, cb, params, n_cw)
        table = build_cost_matrix(if_rate_table(channel, cb, params), n_cw).values
        achieved = sum(table[u, assignment.selected[u]] for u in range(n_users))
        best = max(
            sum(table[u, p[u]] for u in range(n_users))
            for p in itertools.permutations(range(n_cw), n_users)
        )
        worst = max(worst, abs(achieved - best))
    passed = worst == 0.0
    return SuiteResult(
        "assignment_pipeline", passed, f"max objective gap = {worst:.3e}"
    )


def run_all(seed: int = 20240901) -> list[SuiteResult]:
    """Run every oracle suite; deterministic for a fixed seed."""
    return [
        _codebook_orthonormality(),
        _hungarian_optimality(seed),
        _channel_transform(seed),
        _zf_nulling(seed),
        _assignment_pipeline(seed),
    ]
