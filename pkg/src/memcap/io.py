"""CSV file formats: traces, segments, observations, drift data, channels, curves.

All files are UTF-8 with '#'-prefixed comment lines; floats are written with
17 significant digits so every value round-trips exactly and repeated runs
are byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .drift import (
    DRIFT_SAMPLE_HEADER,
    DriftChannelMatrix,
    DriftSample,
    QuantisationGrid,
    RetentionSeries,
)
from .energyfit import EnergyCostModel, EnergyObservation, FitDiagnostics
from .errors import IngestError
from .capacity import CapacityCurvePoint
from .signals import MeasurementRecord, VITrace

TRACE_HEADER_DEVICE = "t,v,i"
TRACE_HEADER_MEASUREMENT = "t,v_total,v_series"
OBSERVATION_HEADER = "r_ohms,e_joules"
SEGMENT_HEADER = "segment,start_index,end_index"
RETENTION_HEADER = "t_min,r_ohms"
CURVE_HEADER = "delay_min,s,avg_energy_j,capacity_bits,gap_bits,converged"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _data_lines(path) -> list[tuple[int, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    return [
        (no, line.strip())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]


def _parse_float_rows(path, expected_header: str, n_fields: int) -> list[list[float]]:
    content = _data_lines(path)
    if not content:
        raise IngestError(f"{path}: empty file, expected header '{expected_header}'")
    header_no, header = content[0]
    if header != expected_header:
        raise IngestError(f"{path}:{header_no}: expected header '{expected_header}', got '{header}'")
    rows = []
    for no, line in content[1:]:
        parts = line.split(",")
        if len(parts) != n_fields:
            raise IngestError(f"{path}:{no}: expected {n_fields} fields, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise IngestError(f"{path}:{no}: non-numeric field ({exc})") from exc
    return rows


def write_waveform_csv(path, t: np.ndarray, v: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,v\n")
        for tk, vk in zip(t, v):
            fh.write(f"{fmt(tk)},{fmt(vk)}\n")


def write_trace_csv(path, trace: VITrace) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER_DEVICE + "\n")
        for t, v, i in zip(trace.t, trace.v, trace.i):
            fh.write(f"{fmt(t)},{fmt(v)},{fmt(i)}\n")


def write_records_csv(path, records: MeasurementRecord) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER_MEASUREMENT + "\n")
        for t, vt, vs in zip(records.t, records.v_total, records.v_series):
            fh.write(f"{fmt(t)},{fmt(vt)},{fmt(vs)}\n")


def read_trace_csv(path) -> VITrace | MeasurementRecord:
    """Read a trace file in either the device or the measurement frame."""
    content = _data_lines(path)
    if not content:
        raise IngestError(f"{path}: empty trace file")
    header = content[0][1]
    if header == TRACE_HEADER_DEVICE:
        rows = _parse_float_rows(path, TRACE_HEADER_DEVICE, 3)
        arr = np.array(rows) if rows else np.empty((0, 3))
        return VITrace(t=arr[:, 0], v=arr[:, 1], i=arr[:, 2])
    if header == TRACE_HEADER_MEASUREMENT:
        rows = _parse_float_rows(path, TRACE_HEADER_MEASUREMENT, 3)
        arr = np.array(rows) if rows else np.empty((0, 3))
        return MeasurementRecord(t=arr[:, 0], v_total=arr[:, 1], v_series=arr[:, 2])
    raise IngestError(
        f"{path}: unknown trace header '{header}'; expected '{TRACE_HEADER_DEVICE}' or '{TRACE_HEADER_MEASUREMENT}'"
    )


def write_segments_csv(path, segments: Sequence[tuple[str, int, int]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SEGMENT_HEADER + "\n")
        for label, start, stop in segments:
            fh.write(f"{label},{start},{stop}\n")


def read_segments_csv(path) -> list[tuple[str, int, int]]:
    content = _data_lines(path)
    if not content or content[0][1] != SEGMENT_HEADER:
        raise IngestError(f"{path}: expected header '{SEGMENT_HEADER}'")
    out = []
    for no, line in content[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            raise IngestError(f"{path}:{no}: expected 3 fields")
        out.append((parts[0], int(parts[1]), int(parts[2])))
    return out


def write_observations_csv(path, observations: Iterable[EnergyObservation]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(OBSERVATION_HEADER + "\n")
        for ob in observations:
            fh.write(f"{fmt(ob.r)},{fmt(ob.e)}\n")


def read_observations_csv(path) -> list[EnergyObservation]:
    rows = _parse_float_rows(path, OBSERVATION_HEADER, 2)
    return [EnergyObservation(r=r, e=e) for r, e in rows]


def write_fit_report(path, model: EnergyCostModel, diagnostics: FitDiagnostics, observations: Sequence[EnergyObservation]) -> None:
    """Fit summary plus per-point residuals, enough to re-plot the cost curve."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# a_joules={fmt(model.a)}\n")
        fh.write(f"# b_ohms={fmt(model.b)}\n")
        fh.write(f"# rss={fmt(diagnostics.rss)}\n")
        fh.write(f"# iterations={diagnostics.iterations}\n")
        fh.write(f"# branch_valid={int(diagnostics.branch_valid)}\n")
        fh.write("r_ohms,e_joules,residual_joules\n")
        for ob, res in zip(observations, diagnostics.residuals):
            fh.write(f"{fmt(ob.r)},{fmt(ob.e)},{fmt(res)}\n")


def write_drift_samples(path, samples: Iterable[DriftSample]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(DRIFT_SAMPLE_HEADER + "\n")
        for s in samples:
            fh.write(f"{fmt(s.r_init)},{fmt(s.delay)},{fmt(s.r_final)}\n")


def read_retention_series(path) -> RetentionSeries:
    rows = _parse_float_rows(path, RETENTION_HEADER, 2)
    arr = np.array(rows)
    return RetentionSeries(t=arr[:, 0], r=arr[:, 1])


def write_retention_series(path, series: RetentionSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RETENTION_HEADER + "\n")
        for t, r in zip(series.t, series.r):
            fh.write(f"{fmt(t)},{fmt(r)}\n")


def write_channel_csv(path, matrix: DriftChannelMatrix, seed: int | None = None) -> None:
    """Channel matrix file: '#' key=value header block, q_in matrix rows, one cost row."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# delay_min={fmt(matrix.delay)}\n")
        fh.write(
            f"# input_grid_lo={fmt(matrix.input_grid.lo)} input_grid_hi={fmt(matrix.input_grid.hi)} input_grid_q={matrix.input_grid.q}\n"
        )
        fh.write(
            f"# output_grid_lo={fmt(matrix.output_grid.lo)} output_grid_hi={fmt(matrix.output_grid.hi)} output_grid_q={matrix.output_grid.q}\n"
        )
        fh.write(f"# samples_per_input={matrix.samples_per_input}\n")
        if seed is not None:
            fh.write(f"# seed={seed}\n")
        fh.write("# rows: transition matrix (one row per input symbol), then one row of symbol costs\n")
        for row in matrix.p:
            fh.write(",".join(fmt(x) for x in row) + "\n")
        fh.write(",".join(fmt(c) for c in matrix.costs) + "\n")


def read_channel_csv(path) -> DriftChannelMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    meta: dict[str, str] = {}
    rows = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line.lstrip("#").split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    meta[key] = value
            continue
        try:
            rows.append([float(p) for p in line.split(",")])
        except ValueError as exc:
            raise IngestError(f"{path}:{no}: non-numeric matrix entry ({exc})") from exc
    required = (
        "delay_min",
        "input_grid_lo",
        "input_grid_hi",
        "input_grid_q",
        "output_grid_lo",
        "output_grid_hi",
        "output_grid_q",
        "samples_per_input",
    )
    missing = [k for k in required if k not in meta]
    if missing:
        raise IngestError(f"{path}: missing header keys {missing}")
    input_grid = QuantisationGrid(float(meta["input_grid_lo"]), float(meta["input_grid_hi"]), int(meta["input_grid_q"]))
    output_grid = QuantisationGrid(
        float(meta["output_grid_lo"]), float(meta["output_grid_hi"]), int(meta["output_grid_q"])
    )
    if len(rows) != input_grid.q + 1:
        raise IngestError(f"{path}: expected {input_grid.q} matrix rows plus a cost row, found {len(rows)}")
    p = np.array(rows[: input_grid.q])
    costs = np.array(rows[input_grid.q])
    return DriftChannelMatrix(
        delay=float(meta["delay_min"]),
        input_grid=input_grid,
        output_grid=output_grid,
        p=p,
        costs=costs,
        samples_per_input=int(meta["samples_per_input"]),
    )


def write_curve_csv(path, delay: float, points: Sequence[CapacityCurvePoint]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CURVE_HEADER + "\n")
        for pt in points:
            fh.write(
                f"{fmt(delay)},{fmt(pt.s)},{fmt(pt.avg_energy)},{fmt(pt.capacity)},{fmt(pt.gap)},{int(pt.converged)}\n"
            )


def write_input_distributions_csv(path, delay: float, points: Sequence[CapacityCurvePoint]) -> None:
    """Optional companion file: one optimal input distribution per curve point."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# one row per curve point: delay_min,s,p_0..p_{q-1}\n")
        fh.write("delay_min,s,input_distribution\n")
        for pt in points:
            dist = ",".join(fmt(x) for x in pt.input_distribution)
            fh.write(f"{fmt(delay)},{fmt(pt.s)},{dist}\n")
