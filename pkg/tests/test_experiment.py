import dataclasses

import numpy as np
import pytest

import beamsel.experiment as experiment
from beamsel.baselines import SchemeId, fully_digital
from beamsel.channel import trial_rng
from beamsel.codebook import dft_codebook
from beamsel.experiment import SweepConfig, run_sweep, run_trial
from beamsel.precoding import design_hybrid
from beamsel.rate import rates_from_composites
from beamsel.selection import select_codewords

from conftest import make_params, model_channel


def small_config(**overrides) -> SweepConfig:
    base = dict(
        params=make_params(n_antennas=8, n_users=2, n_rf_chains=2,
                           n_subcarriers=4, n_taps=2, n_paths=2),
        axis="snr_db",
        snr_db=(0.0, 14.0),
        schemes=(SchemeId.PROPOSED, SchemeId.FULLY_DIGITAL),
        criterion="mmse",
        n_candidates=2,
        n_trials=4,
        master_seed=3,
    )
    base.update(overrides)
    return SweepConfig(**base)


# ------------------------------------------------------------------- run_trial


def test_run_trial_deterministic():
    params = make_params().with_snr_db(10.0)
    a = run_trial(params, SchemeId.PROPOSED, trial_rng(1, 5), "mmse", 4)
    b = run_trial(params, SchemeId.PROPOSED, trial_rng(1, 5), "mmse", 4)
    assert a.sum_rate == b.sum_rate
    assert np.array_equal(
        a.report.per_user_per_subcarrier, b.report.per_user_per_subcarrier
    )
    assert a.selected == b.selected


def test_run_trial_snr_parameterization_invariance():
    # Scaling noise_var and total_power by the same power of two leaves
    # every float in the ZF rate computation bit-identical.
    params = make_params(n_antennas=16, total_power=64.0, noise_var=1.0)
    scaled = dataclasses.replace(
        params, total_power=params.total_power * 4.0, noise_var=4.0
    )
    a = run_trial(params, SchemeId.PROPOSED, trial_rng(2, 0), "zf", 4)
    b = run_trial(scaled, SchemeId.PROPOSED, trial_rng(2, 0), "zf", 4)
    assert a.sum_rate == b.sum_rate


def test_run_trial_matches_hand_composed_pipeline():
    # Oracle: compose the stage functions manually with the same stream.
    params = make_params(n_antennas=8, n_users=2, n_rf_chains=2,
                         n_subcarriers=2, n_taps=2).with_snr_db(14.0)
    result = run_trial(params, SchemeId.PROPOSED, trial_rng(9, 1), "mmse", 2)

    channel = model_channel(params, trial_rng(9, 1))
    cb = dft_codebook(params.n_antennas)
    _, analog = select_codewords(channel, cb, params, 2)
    precoder = design_hybrid(channel, analog, params, "mmse")
    report = rates_from_composites(channel, precoder.composites(), params)
    assert result.sum_rate == report.sum_rate
    assert result.selected == analog.selected


def test_run_trial_fully_digital_matches_direct_evaluation():
    params = make_params().with_snr_db(14.0)
    result = run_trial(params, SchemeId.FULLY_DIGITAL, trial_rng(4, 2), "zf")
    channel = model_channel(params, trial_rng(4, 2))
    report = rates_from_composites(
        channel, fully_digital(channel, params, "zf"), params
    )
    assert result.sum_rate == report.sum_rate
    assert result.selected is None


def test_run_trial_greedy_reports_conflicts_sometimes():
    params = make_params(n_antennas=8).with_snr_db(14.0)
    flags = [
        run_trial(params, SchemeId.GREEDY, trial_rng(1, t), "mmse").beam_conflict
        for t in range(40)
    ]
    assert any(flags)   # 4 users on an 8-beam grid collide often
    assert not all(flags)


# ------------------------------------------------------------------- run_sweep


def test_sweep_single_row_equals_trial():
    config = small_config(
        snr_db=(6.0,), schemes=(SchemeId.PROPOSED,), n_trials=1
    )
    table = run_sweep(config)
    assert len(table.rows) == 1
    row = table.rows[0]
    params = config.params_at(6.0)
    trial = run_trial(params, SchemeId.PROPOSED, trial_rng(3, 0), "mmse", 2)
    assert row.mean_sum_rate == trial.sum_rate
    assert row.stderr == 0.0
    assert row.n_trials == 1
    assert row.n_failures == 0
    assert row.mean_per_user_rate == row.mean_sum_rate / params.n_users


def test_sweep_results_paired_across_scheme_sets():
    # Adding a scheme must not disturb the other schemes' trials.
    lone = run_sweep(small_config(schemes=(SchemeId.PROPOSED,)))
    both = run_sweep(
        small_config(schemes=(SchemeId.PROPOSED, SchemeId.GREEDY))
    )
    lone_rows = {(r.axis_value): r for r in lone.rows}
    for row in both.rows:
        if row.scheme != "proposed":
            continue
        assert row.mean_sum_rate == lone_rows[row.axis_value].mean_sum_rate


def test_sweep_parallel_matches_serial():
    serial = run_sweep(small_config(n_workers=1))
    threaded = run_sweep(small_config(n_workers=4))
    assert len(serial.rows) == len(threaded.rows)
    for a, b in zip(serial.rows, threaded.rows):
        assert a.scheme == b.scheme
        assert a.axis_value == b.axis_value
        assert a.mean_sum_rate == b.mean_sum_rate
        assert a.stderr == b.stderr
        assert a.n_failures == b.n_failures


def test_sweep_zf_sum_rate_monotone_in_snr_per_trial():
    params = make_params(n_antennas=16).with_snr_db(0.0)
    grid = [0.0, 2.0, 4.0, 6.0]
    for trial in range(10):
        rates = [
            run_trial(params.with_snr_db(snr), SchemeId.PROPOSED,
                      trial_rng(11, trial), "zf", 4).sum_rate
            for snr in grid
        ]
        assert all(b > a for a, b in zip(rates, rates[1:]))


def test_sweep_user_axis_rows():
    config = SweepConfig(
        params=make_params(n_antennas=16, n_users=4, n_rf_chains=4),
        axis="n_users",
        snr_db=(14.0,),
        user_counts=(2, 4),
        schemes=(SchemeId.FULLY_DIGITAL,),
        n_trials=2,
        master_seed=1,
    )
    table = run_sweep(config)
    assert [r.axis_value for r in table.rows] == [2.0, 4.0]
    for row in table.rows:
        assert row.mean_per_user_rate == row.mean_sum_rate / row.axis_value


def test_sweep_records_failures(monkeypatch):
    real = experiment.run_trial

    def flaky(params, scheme, rng, criterion="mmse", n_candidates=4):
        value = rng.uniform()  # consume to vary across trials
        if value < 0.5:
            raise RuntimeError("synthetic failure")
        return real(params, scheme, rng, criterion, n_candidates)

    monkeypatch.setattr(experiment, "run_trial", flaky)
    table = run_sweep(small_config(snr_db=(6.0,), schemes=(SchemeId.PROPOSED,),
                                   n_trials=12))
    row = table.rows[0]
    assert 0 < row.n_failures < 12
    assert np.isfinite(row.mean_sum_rate)


def test_sweep_config_validation():
    with pytest.raises(ValueError, match="axis"):
        small_config(axis="bandwidth")
    with pytest.raises(ValueError, match="n_trials"):
        small_config(n_trials=0)
    with pytest.raises(ValueError, match="scheme"):
        small_config(schemes=())
    with pytest.raises(ValueError, match="snr_db"):
        small_config(axis="n_users", user_counts=(2,), snr_db=(0.0, 14.0))
    with pytest.raises(ValueError, match="user count"):
        small_config(axis="n_users", user_counts=(5,), snr_db=(14.0,))
    with pytest.raises(ValueError, match="criterion"):
        small_config(criterion="mrc")


def test_config_hash_ignores_workers():
    a = small_config(n_workers=1)
    b = small_config(n_workers=8)
    assert a.config_hash() == b.config_hash()
    c = small_config(master_seed=99)
    assert c.config_hash() != a.config_hash()


def test_snr_conversion():
    params = make_params(noise_var=1.0).with_snr_db(14.0)
    assert params.total_power == pytest.approx(
        10 ** 1.4 * params.n_users, rel=1e-12
    )
