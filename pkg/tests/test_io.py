import numpy as np
import pytest

from memcap import (
    DeviceParams,
    EnergyCostModel,
    EnergyObservation,
    IngestError,
    MeasurementRecord,
    ReferenceDriftParams,
    VITrace,
    blahut_arimoto,
    estimate_channel,
    fit_energy_model,
    make_grid,
    reference_sampler,
)
from memcap.capacity import ChannelSpec
from memcap import io as mio


def test_trace_csv_round_trip_device_frame(tmp_path):
    rng = np.random.default_rng(0)
    trace = VITrace(t=np.arange(40) * 1e-5, v=rng.normal(size=40), i=1e-6 * rng.normal(size=40))
    path = tmp_path / "trace.csv"
    mio.write_trace_csv(path, trace)
    back = mio.read_trace_csv(path)
    assert isinstance(back, VITrace)
    np.testing.assert_array_equal(back.t, trace.t)
    np.testing.assert_array_equal(back.v, trace.v)
    np.testing.assert_array_equal(back.i, trace.i)


def test_trace_csv_round_trip_measurement_frame(tmp_path):
    rng = np.random.default_rng(1)
    rec = MeasurementRecord(t=np.arange(30) * 1e-5, v_total=rng.normal(size=30), v_series=rng.normal(size=30))
    path = tmp_path / "records.csv"
    mio.write_records_csv(path, rec)
    back = mio.read_trace_csv(path)
    assert isinstance(back, MeasurementRecord)
    np.testing.assert_array_equal(back.v_total, rec.v_total)


def test_trace_csv_ignores_comments(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("# a comment\nt,v,i\n0,1,2\n# another\n1,3,4\n")
    back = mio.read_trace_csv(path)
    assert len(back) == 2


def test_unknown_header_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,volts\n0,1\n")
    with pytest.raises(IngestError):
        mio.read_trace_csv(path)


def test_segments_round_trip(tmp_path):
    segments = [("reset", 0, 300), ("read0", 300, 400), ("set", 400, 600)]
    path = tmp_path / "segments.csv"
    mio.write_segments_csv(path, segments)
    assert mio.read_segments_csv(path) == segments


def test_observations_round_trip(tmp_path):
    obs = [EnergyObservation(r=1e6, e=2.5e-9), EnergyObservation(r=3.3e5, e=1e-8)]
    path = tmp_path / "obs.csv"
    mio.write_observations_csv(path, obs)
    assert mio.read_observations_csv(path) == obs


def test_fit_report_contains_parameters(tmp_path):
    r = np.geomspace(2e5, 5e6, 12)
    obs = [EnergyObservation(r=float(x), e=float(2e-4 * np.log(7e6 / x))) for x in r]
    model, diag = fit_energy_model(obs)
    path = tmp_path / "fit.csv"
    mio.write_fit_report(path, model, diag, obs)
    text = path.read_text()
    assert "# a_joules=" in text
    assert "# rss=" in text
    assert text.count("\n") == 5 + 1 + len(obs)


def test_channel_csv_round_trip(tmp_path):
    grid_in = make_grid(1e5, 1e6, 8)
    grid_out = make_grid(1e5, 2e7, 12)
    params = ReferenceDriftParams(volatility=0.25)
    matrix = estimate_channel(
        reference_sampler(params), grid_in, grid_out, 10.0, 100, EnergyCostModel.knowm_sdc(), seed=9
    )
    path = tmp_path / "channel.csv"
    mio.write_channel_csv(path, matrix, seed=9)
    back = mio.read_channel_csv(path)
    np.testing.assert_array_equal(back.p, matrix.p)
    np.testing.assert_array_equal(back.costs, matrix.costs)
    assert back.delay == matrix.delay
    assert back.input_grid.same_bins(matrix.input_grid)
    assert back.output_grid.same_bins(matrix.output_grid)
    assert back.samples_per_input == matrix.samples_per_input


def test_retention_series_round_trip(tmp_path):
    from memcap.drift import RetentionSeries

    series = RetentionSeries(t=np.arange(10.0), r=np.geomspace(1e5, 1e7, 10))
    path = tmp_path / "series.csv"
    mio.write_retention_series(path, series)
    back = mio.read_retention_series(path)
    np.testing.assert_array_equal(back.t, series.t)
    np.testing.assert_array_equal(back.r, series.r)


def test_input_distribution_csv(tmp_path):
    channel = ChannelSpec(p=[[0.9, 0.1], [0.1, 0.9]], costs=[0.0, 1.0])
    points = [blahut_arimoto(channel, s=0.5)]
    path = tmp_path / "dist.csv"
    mio.write_input_distributions_csv(path, 10.0, points)
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    values = lines[1].split(",")
    assert len(values) == 2 + 2  # delay, s, then one probability per input symbol
    assert float(values[2]) + float(values[3]) == pytest.approx(1.0, abs=1e-9)


def test_curve_csv_format(tmp_path):
    channel = ChannelSpec(p=[[0.9, 0.1], [0.1, 0.9]], costs=[0.0, 1.0])
    points = [blahut_arimoto(channel, s=s) for s in (0.1, 1.0)]
    path = tmp_path / "curve.csv"
    mio.write_curve_csv(path, 10.0, points)
    lines = path.read_text().splitlines()
    assert lines[0] == mio.CURVE_HEADER
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[0]) == 10.0
    assert first[5] in ("0", "1")
