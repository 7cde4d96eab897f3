"""Acceptance suite: one test per release criterion, stated tolerances only.

Each test prints a single [PASS]/[FAIL] line (visible with pytest -s) in
addition to asserting, so the suite doubles as a runnable checklist.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from memcap import (
    ChannelSpec,
    DeviceParams,
    EnergyObservation,
    ReferenceDriftParams,
    VITrace,
    blahut_arimoto,
    delay_sweep,
    estimate_channel,
    estimate_state,
    fit_energy_model,
    make_grid,
    mutual_information,
    reference_sampler,
)
from memcap.capacity import default_s_grid
from memcap.cli import main
from memcap.device import conductance_denominator
from memcap.energyfit import EnergyCostModel, KNOWM_SDC_A, KNOWM_SDC_B
from memcap.signals import AlignmentConfig, correct_offset
from memcap.simulate import device_trace, ohmic_trace

PARAMS = DeviceParams.knowm_sdc()
BSC_01_CAPACITY = 0.5310044064107188  # 1 - H2(0.1), frozen from 50-digit arithmetic


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}{': ' + detail if detail else ''}")
    assert ok, f"{name} failed: {detail}"


def test_ba_analytic_channels():
    start = time.perf_counter()
    bsc = ChannelSpec(p=[[0.9, 0.1], [0.1, 0.9]], costs=[0.0, 0.0])
    point_bsc = blahut_arimoto(bsc, s=0.0, tol=1e-7)
    t_bsc = time.perf_counter() - start

    start = time.perf_counter()
    bec = ChannelSpec(p=[[0.7, 0.3, 0.0], [0.0, 0.3, 0.7]], costs=[0.0, 0.0])
    point_bec = blahut_arimoto(bec, s=0.0, tol=1e-7)
    t_bec = time.perf_counter() - start

    err_bsc = abs(point_bsc.capacity - BSC_01_CAPACITY)
    err_bec = abs(point_bec.capacity - 0.7)
    ok = err_bsc <= 1e-4 and err_bec <= 1e-4 and t_bsc < 1.0 and t_bec < 1.0
    report(
        "BA analytic capacities",
        ok,
        f"BSC err {err_bsc:.2e}, BEC err {err_bec:.2e}, runtimes {t_bsc:.3f}s/{t_bec:.3f}s",
    )


def test_ba_matches_brute_force_on_random_channels():
    start = time.perf_counter()
    rng = np.random.default_rng(123)
    ticks = np.arange(0.0, 1.0 + 0.0025, 0.005)
    grid = []
    for p0 in ticks:
        for p1 in ticks:
            p2 = 1.0 - p0 - p1
            if p2 >= -1e-12:
                grid.append((p0, p1, max(p2, 0.0)))
    grid = np.array(grid)

    worst = 0.0
    for _ in range(5):
        p = rng.uniform(0.05, 1.0, size=(3, 3))
        p /= p.sum(axis=1, keepdims=True)
        channel = ChannelSpec(p=p, costs=rng.uniform(0.0, 1.0, size=3))
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0, p * np.log(p), 0.0).sum(axis=1)
        q = grid @ p
        with np.errstate(divide="ignore", invalid="ignore"):
            qlogq = np.where(q > 0, q * np.log(q), 0.0).sum(axis=1)
        grid_mi = (grid @ plogp - qlogq) / np.log(2.0)
        grid_cost = grid @ channel.costs
        for s in (0.0, 0.3, 1.5, 8.0, 50.0):
            point = blahut_arimoto(channel, s=s, tol=1e-8)
            feasible = grid_cost <= point.avg_energy + 1e-9
            best = float(np.max(grid_mi[feasible]))
            worst = max(worst, abs(point.capacity - best))
    elapsed = time.perf_counter() - start
    ok = worst <= 5e-3 and elapsed < 30.0
    report("cost-constrained BA vs simplex grid search", ok, f"worst gap {worst:.2e} bits, {elapsed:.1f}s")


def test_energy_fit_recovery():
    start = time.perf_counter()
    r_values = np.tile(np.geomspace(2e5, 5e6, 12), 4)
    passes = 0
    for trial in range(20):
        rng = np.random.default_rng(1000 + trial)
        e = KNOWM_SDC_A * np.log(KNOWM_SDC_B / r_values)
        e = e * (1.0 + 0.05 * rng.standard_normal(len(e)))
        obs = [EnergyObservation(r=float(rk), e=float(max(ek, 0.0))) for rk, ek in zip(r_values, e)]
        model, _ = fit_energy_model(obs)
        if abs(model.a - KNOWM_SDC_A) <= 0.1 * KNOWM_SDC_A and abs(model.b - KNOWM_SDC_B) <= 0.1 * KNOWM_SDC_B:
            passes += 1
    elapsed = time.perf_counter() - start
    ok = passes >= 19 and elapsed < 5.0
    report("energy-fit parameter recovery", ok, f"{passes}/20 trials within 10%, {elapsed:.2f}s")


def _read_trace(x, noise_sigma=0.0, rng=None, n=200, amplitude=0.2):
    phase = np.arange(n) / n
    tri = np.where(phase < 0.25, 4 * phase, np.where(phase < 0.75, 2 - 4 * phase, 4 * phase - 4))
    v = amplitude * tri
    i = x * conductance_denominator(v, PARAMS)
    if noise_sigma > 0.0:
        i = i + noise_sigma * rng.standard_normal(n)
    return VITrace(t=np.arange(n) * 1e-5, v=v, i=i)


def test_state_estimator():
    states = np.geomspace(1e-8, 1e-2, 20)

    worst_rel = 0.0
    for x in states:
        est = estimate_state(_read_trace(float(x)), PARAMS)
        worst_rel = max(worst_rel, abs(est.x - x) / x)
    noiseless_ok = worst_rel < 1e-10

    # One trial draws fresh 20 dB noise for all 20 states; MSE compares the
    # relative errors so every state weighs equally.
    clean = {float(x): _read_trace(float(x)) for x in states}
    sigma = {x: float(np.sqrt(np.mean(tr.i**2)) / 10.0) for x, tr in clean.items()}
    denominators = {x: conductance_denominator(tr.v, PARAMS) for x, tr in clean.items()}
    rng = np.random.default_rng(777)
    wins = 0
    trials = 1000
    for _ in range(trials):
        se_weighted = []
        se_uniform = []
        for x, trace in clean.items():
            noisy_i = trace.i + sigma[x] * rng.standard_normal(len(trace))
            noisy = VITrace(t=trace.t, v=trace.v, i=noisy_i)
            est = estimate_state(noisy, PARAMS)
            denom = denominators[x]
            keep = np.abs(denom) >= 1e-12
            uniform = float(np.mean(noisy_i[keep] / denom[keep]))
            se_weighted.append(((est.x - x) / x) ** 2)
            se_uniform.append(((uniform - x) / x) ** 2)
        if np.mean(se_weighted) <= np.mean(se_uniform):
            wins += 1
    noisy_ok = wins / trials >= 0.95
    report(
        "state estimator accuracy",
        noiseless_ok and noisy_ok,
        f"worst noiseless rel err {worst_rel:.2e}, weighted wins {wins}/{trials}",
    )


def test_offset_correction_recovery():
    rng = np.random.default_rng(2024)
    failures = []
    for case in range(100):
        ohmic = case < 50
        if ohmic:
            resistance = float(rng.uniform(1e5, 1e7))
            amplitude = float(rng.uniform(0.2, 1.0))
            trace = ohmic_trace(resistance, amplitude, 400)
        else:
            x = float(rng.uniform(1e-7, 1e-5))
            amplitude = float(rng.uniform(0.1, 0.4))
            trace = device_trace(x, PARAMS, amplitude, 400)
        amp_v = 0.5 * (trace.v.max() - trace.v.min())
        amp_i = 0.5 * (trace.i.max() - trace.i.min())
        dv = float(rng.uniform(-0.05, 0.05)) * amp_v
        di = float(rng.uniform(-0.05, 0.05)) * amp_i
        shifted = VITrace(t=trace.t, v=trace.v + dv, i=trace.i + di)
        _, offsets = correct_offset(shifted, AlignmentConfig(n_period=len(shifted)))
        if abs(offsets.dv + dv) > 0.01 * amp_v or abs(offsets.di + di) > 0.01 * amp_i:
            failures.append(case)
    report("offset correction recovery", not failures, f"failures: {failures or 'none'} of 100")


def test_channel_estimation_invariants():
    model = EnergyCostModel.knowm_sdc()
    input_grid = make_grid(1e5, 1e6, 12)
    output_grid = make_grid(1e5, 2e7, 25)
    rng = np.random.default_rng(55)
    row_sums_ok = True
    for k in range(100):
        theta = float(rng.uniform(0.0, 0.3))
        sigma = float(rng.uniform(0.01, 0.5))
        params = ReferenceDriftParams(reversion_rate=theta, volatility=sigma)
        matrix = estimate_channel(
            reference_sampler(params), input_grid, output_grid, float(rng.uniform(1, 100)), 60, model, seed=k
        )
        if not np.all(np.abs(matrix.p.sum(axis=1) - 1.0) <= 1e-9):
            row_sums_ok = False

    params = ReferenceDriftParams(reversion_rate=0.05, volatility=0.1)
    one = estimate_channel(reference_sampler(params), input_grid, output_grid, 10.0, 400, model, seed=99)
    two = estimate_channel(reference_sampler(params), input_grid, output_grid, 10.0, 400, model, seed=99)
    reproducible = np.array_equal(one.p, two.p) and np.array_equal(one.costs, two.costs)
    report(
        "channel estimation invariants",
        row_sums_ok and reproducible,
        f"row sums ok={row_sums_ok}, seed-fixed reproducible={reproducible}",
    )


def test_capacity_curves_reference_drift():
    start = time.perf_counter()
    params = ReferenceDriftParams(equilibrium=7.1853e6, reversion_rate=0.05, volatility=0.1)
    model = EnergyCostModel.knowm_sdc()
    input_grid = make_grid(1e5, 1e6, 100)
    output_grid = make_grid(1e5, 2e7, 100)
    channels = [
        estimate_channel(reference_sampler(params), input_grid, output_grid, d, 1000, model, seed=1)
        for d in (10.0, 50.0, 100.0)
    ]
    curves = delay_sweep(channels, default_s_grid())
    elapsed = time.perf_counter() - start

    monotone = True
    bounded = True
    for curve in curves:
        caps = [pt.capacity for pt in curve.points]
        for a, b in zip(caps, caps[1:]):
            if b < a - 1e-6:
                monotone = False
        if max(caps) > np.log2(100) or min(caps) < 0.0:
            bounded = False
    max_caps = [max(pt.capacity for pt in curve.points) for curve in curves]
    ordered = max_caps[0] >= max_caps[1] >= max_caps[2]
    ok = monotone and ordered and bounded and elapsed < 300.0
    report(
        "reference-drift capacity-cost curves",
        ok,
        f"max capacities {[round(c, 4) for c in max_caps]} bits, monotone={monotone}, {elapsed:.0f}s",
    )


def test_pipeline_determinism(tmp_path):
    config = tmp_path / "config.ini"
    config.write_text(
        "[run]\nseed = 11\n"
        "[experiment]\nn_amplitudes = 6\nrepeats = 2\n"
        "[grids]\ninput_q = 25\noutput_q = 30\n"
        "[capacity]\ndelays = 10,50\nn = 120\ns_count = 12\nmax_iter = 3000\n"
    )
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["pipeline", "--config", str(config), "--out-dir", str(out_a)]) == 0
    assert main(["pipeline", "--config", str(config), "--out-dir", str(out_b)]) == 0
    files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*.csv"))
    files_b = sorted(p.relative_to(out_b) for p in out_b.rglob("*.csv"))
    same_names = files_a == files_b
    same_bytes = all((out_a / rel).read_bytes() == (out_b / rel).read_bytes() for rel in files_a)
    manifest_a = json.loads((out_a / "manifest.json").read_text())
    six_stages = [s["name"] for s in manifest_a["stages"]] == [
        "synth",
        "preprocess",
        "estimate",
        "fit",
        "channel",
        "capacity",
    ]
    report(
        "pipeline determinism",
        same_names and same_bytes and six_stages,
        f"{len(files_a)} CSVs byte-identical across reruns",
    )
