import numpy as np
import pytest

from driftgan import (
    GanConfig,
    evaluate_delay_consistency,
    export_samples,
    ks_statistic,
    load_bundled_series,
    train,
)
from driftgan.export import INTERCHANGE_HEADER


@pytest.fixture(scope="module")
def short_model():
    return train(load_bundled_series(), GanConfig(epochs=20, seed=7))


def test_export_row_count(short_model, tmp_path):
    path = tmp_path / "samples.csv"
    rows = export_samples(short_model, np.geomspace(2e5, 9e5, 4), [10.0, 50.0], 25, path, seed=1)
    assert rows == 4 * 2 * 25
    lines = path.read_text().splitlines()
    assert lines[0] == INTERCHANGE_HEADER
    assert len(lines) == 1 + rows


def test_export_zero_samples_header_only(short_model, tmp_path):
    path = tmp_path / "empty.csv"
    rows = export_samples(short_model, [1e6], [10.0], 0, path, seed=1)
    assert rows == 0
    assert path.read_text() == INTERCHANGE_HEADER + "\n"


def test_export_seed_reproducible(short_model, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_samples(short_model, [1e6, 5e5], [10.0], 50, a, seed=3)
    export_samples(short_model, [1e6, 5e5], [10.0], 50, b, seed=3)
    assert a.read_bytes() == b.read_bytes()


def test_exported_file_parses_in_channel_estimator(short_model, tmp_path):
    memcap_drift = pytest.importorskip("memcap.drift")
    path = tmp_path / "samples.csv"
    rows = export_samples(short_model, np.geomspace(2e5, 9e5, 3), [10.0], 40, path, seed=2)
    samples, rejected = memcap_drift.ingest_drift_samples(path)
    assert rejected == []
    assert len(samples) == rows


def test_ks_statistic_basics():
    rng = np.random.default_rng(0)
    same = rng.normal(size=2000)
    assert ks_statistic(same, same) == 0.0
    shifted = rng.normal(size=2000) + 3.0
    assert ks_statistic(same, shifted) > 0.8


def test_identical_paths_have_zero_distance(short_model):
    # same seed, same path: the two-sample statistic collapses to zero
    from driftgan import sample_jump

    a = sample_jump(short_model, [1e6], 10.0, 500, np.random.default_rng(9))[0]
    b = sample_jump(short_model, [1e6], 10.0, 500, np.random.default_rng(9))[0]
    assert ks_statistic(a, b) == 0.0


def test_consistency_report_shape(short_model):
    report = evaluate_delay_consistency(short_model, [5e5, 5e6], 5.0, 200, seed=1)
    assert report.ks_per_probe.shape == (2,)
    assert 0.0 <= report.max_ks <= 1.0


def test_graceful_extrapolation_past_training_delays(short_model):
    # doubling past the maximum conditioning delay must not blow up the
    # consistency distance (long jumps chain bounded-size steps internally)
    probes = [5e5, 5e6]
    max_delay = short_model.config["max_delay_disc_delay"]
    at_max = evaluate_delay_consistency(short_model, probes, max_delay, 1000, seed=2)
    doubled = evaluate_delay_consistency(short_model, probes, 2 * max_delay, 1000, seed=2)
    noise_floor = 0.1  # two-sample KS spread at n=1000
    assert doubled.max_ks <= max(2.0 * at_max.max_ks, noise_floor)
