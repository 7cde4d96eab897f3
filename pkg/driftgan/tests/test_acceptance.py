"""Secondary acceptance: train on the bundled stand-in data, export, validate.

The exported file must round-trip through the channel estimator's ingestion
(the interchange contract between the two packages) with zero rejected rows.
"""

import numpy as np
import pytest

from driftgan import (
    GanConfig,
    evaluate_delay_consistency,
    export_samples,
    load_bundled_series,
    long_delay_mean,
    train,
)


@pytest.fixture(scope="module")
def trained_model():
    return train(load_bundled_series(), GanConfig(seed=2026))


def report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}{': ' + detail if detail else ''}")
    assert ok, f"{name} failed: {detail}"


def test_training_completes_without_nonfinite_losses(trained_model):
    losses = trained_model.final_losses
    finite = all(np.isfinite(v) for v in losses.values())
    complete = losses["epochs_completed"] == GanConfig().epochs
    report("cGAN training on 9 bundled series", finite and complete, f"final losses {losses}")


def test_export_passes_interchange_validation(trained_model, tmp_path):
    memcap_drift = pytest.importorskip("memcap.drift")
    path = tmp_path / "generated_drift.csv"
    r_grid = np.geomspace(1.05e5, 9.955e5, 100)
    rows = export_samples(trained_model, r_grid, [10.0, 50.0, 100.0], 1000, path, seed=5)
    samples, rejected = memcap_drift.ingest_drift_samples(path)
    ok = rows == 100 * 3 * 1000 and len(samples) == rows and len(rejected) == 0
    report(
        "100x3x1000 export validates with zero rejections",
        ok,
        f"{rows} rows written, {len(samples)} ingested, {len(rejected)} rejected",
    )


def test_delay_consistency(trained_model):
    probes = np.geomspace(2e5, 5e7, 5)
    result = evaluate_delay_consistency(trained_model, probes, 5.0, 2000, seed=3)
    report(
        "delay consistency at 5 units",
        result.max_ks < 0.15,
        f"max KS {result.max_ks:.3f} over probes {np.round(probes, -3)}",
    )


def test_long_delay_equilibrium(trained_model):
    probes = np.geomspace(2e5, 5e7, 5)
    mean = long_delay_mean(trained_model, probes, 400.0, 1000, seed=3)
    ok = 1e7 / 3.0 <= mean <= 3e7
    report("long-delay mean near 10 MOhm", ok, f"mean {mean:.3g} ohms")
