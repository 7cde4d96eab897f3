"""Waveform synthesis, trace preprocessing, segmentation and pulse energy.

Measurement frame: the instrument records the source voltage across the whole
circuit (v_total) and the voltage across the series resistor (v_series).
Device frame: memristor voltage v = v_total - v_series and current
i = v_series / r_series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceParams
from .errors import InvalidArgumentError, OffsetConvergenceError

WAVEFORM_KINDS = ("read", "set", "reset")

# Fraction of a SET/RESET period spent on each linear edge.
DEFAULT_EDGE_FRACTION = 0.05


def _as_float_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InvalidArgumentError(f"{name} must be one-dimensional")
    return arr


@dataclass(frozen=True)
class MeasurementRecord:
    """Time-stamped (v_total, v_series) samples for one measurement window."""

    t: np.ndarray
    v_total: np.ndarray
    v_series: np.ndarray

    def __post_init__(self):
        t = _as_float_array(self.t, "t")
        vt = _as_float_array(self.v_total, "v_total")
        vs = _as_float_array(self.v_series, "v_series")
        if not (len(t) == len(vt) == len(vs)):
            raise InvalidArgumentError("t, v_total, v_series must have equal lengths")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise InvalidArgumentError("timestamps must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v_total", vt)
        object.__setattr__(self, "v_series", vs)

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class VITrace:
    """Device-frame trace: memristor voltage and current over time."""

    t: np.ndarray
    v: np.ndarray
    i: np.ndarray

    def __post_init__(self):
        t = _as_float_array(self.t, "t")
        v = _as_float_array(self.v, "v")
        i = _as_float_array(self.i, "i")
        if not (len(t) == len(v) == len(i)):
            raise InvalidArgumentError("t, v, i must have equal lengths")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise InvalidArgumentError("timestamps must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "i", i)

    def __len__(self) -> int:
        return len(self.t)

    def slice(self, start: int, stop: int) -> "VITrace":
        return VITrace(t=self.t[start:stop], v=self.v[start:stop], i=self.i[start:stop])


@dataclass(frozen=True)
class WaveformSchedule:
    """Periods, amplitudes and read counts for one composite program/read cycle."""

    t_reset: float = 3e-3
    t_read: float = 1e-3
    t_set: float = 2e-3
    a_set: float = 1.0
    a_reset: float = 1.0
    a_read: float = 0.2
    reads_after_reset: int = 2
    reads_after_set: int = 3

    def __post_init__(self):
        for name in ("t_reset", "t_read", "t_set"):
            if getattr(self, name) <= 0.0:
                raise InvalidArgumentError(f"{name} must be strictly positive")
        for name in ("a_set", "a_reset", "a_read"):
            if getattr(self, name) < 0.0:
                raise InvalidArgumentError(f"{name} must be non-negative")
        if self.reads_after_reset < 0 or self.reads_after_set < 0:
            raise InvalidArgumentError("read counts must be non-negative")

    def cycle_span(self) -> float:
        """Total duration of the composite cycle in seconds."""
        return (
            self.t_reset
            + self.t_read * (self.reads_after_reset + self.reads_after_set)
            + self.t_set
        )


@dataclass(frozen=True)
class AlignmentConfig:
    """Knobs for time alignment and offset correction.

    n_discard_max limits how many leading samples the zero-crossing search may
    discard (None: 10% of the trace).  offset_search_range bounds |dv| in
    volts during the offset search (None: 20% of the voltage amplitude); the
    current bound scales by the trace's current/voltage amplitude ratio.
    tol stops the search once the step falls below tol * amplitude.
    """

    n_period: int
    n_discard_max: int | None = None
    offset_search_range: float | None = None
    tol: float = 1e-6
    max_iterations: int = 200

    def __post_init__(self):
        if self.n_period <= 0:
            raise InvalidArgumentError("n_period must be positive")
        if self.tol <= 0.0:
            raise InvalidArgumentError("tol must be positive")


@dataclass(frozen=True)
class OffsetCorrection:
    """Additive offsets found by correct_offset, with objective diagnostics."""

    dv: float
    di: float
    objective_before: float
    objective_after: float
    iterations: int


def synthesize_waveform(
    kind: str,
    schedule: WaveformSchedule,
    sample_rate: float,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
) -> np.ndarray:
    """One period of a READ/SET/RESET command waveform, sampled at sample_rate.

    READ is a symmetric triangle starting at zero on the rising flank.  SET
    and RESET are flat pulses (positive and negative respectively) with linear
    rise/fall edges of edge_fraction * period each.
    """
    if kind not in WAVEFORM_KINDS:
        raise InvalidArgumentError(f"unsupported waveform kind {kind!r}")
    if not 0.0 <= edge_fraction < 0.5:
        raise InvalidArgumentError("edge_fraction must lie in [0, 0.5)")
    period = {"read": schedule.t_read, "set": schedule.t_set, "reset": schedule.t_reset}[kind]
    n = int(round(period * sample_rate))
    if n < 8:
        raise InvalidArgumentError(
            f"sample rate {sample_rate} Hz yields {n} samples for a {period} s period; need >= 8"
        )
    k = np.arange(n, dtype=float)
    if kind == "read":
        phase = k / n
        tri = np.where(phase < 0.25, 4.0 * phase, np.where(phase < 0.75, 2.0 - 4.0 * phase, 4.0 * phase - 4.0))
        return schedule.a_read * tri
    amp = schedule.a_set if kind == "set" else -schedule.a_reset
    n_edge = int(round(edge_fraction * n))
    if n_edge == 0:
        return np.full(n, amp)
    return np.interp(k, [0.0, n_edge, n - n_edge, n], [0.0, amp, amp, 0.0])


def cycle_segment_labels(schedule: WaveformSchedule) -> list[str]:
    """Segment labels of the composite cycle, in order."""
    labels = ["reset"]
    labels += [f"read{j}" for j in range(schedule.reads_after_reset)]
    labels += ["set"]
    labels += [
        f"read{j}" for j in range(schedule.reads_after_reset, schedule.reads_after_reset + schedule.reads_after_set)
    ]
    return labels


def _segment_sample_counts(schedule: WaveformSchedule, sample_rate: float) -> list[tuple[str, int]]:
    periods = {"reset": schedule.t_reset, "set": schedule.t_set}
    out = []
    for label in cycle_segment_labels(schedule):
        period = periods.get(label, schedule.t_read)
        out.append((label, int(round(period * sample_rate))))
    return out


def synthesize_cycle(
    schedule: WaveformSchedule,
    sample_rate: float,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite RESET / reads / SET / reads command cycle.

    Returns (t, v) with t starting at 0 and spaced 1/sample_rate.
    """
    parts = []
    for label in cycle_segment_labels(schedule):
        kind = label if label in ("reset", "set") else "read"
        parts.append(synthesize_waveform(kind, schedule, sample_rate, edge_fraction))
    v = np.concatenate(parts)
    t = np.arange(len(v)) / sample_rate
    return t, v


def to_vi_trace(records: MeasurementRecord, params: DeviceParams) -> VITrace:
    """Convert measurement-frame records to a device-frame VI trace."""
    if len(records) == 0:
        raise InvalidArgumentError("empty measurement record")
    return VITrace(
        t=records.t.copy(),
        v=records.v_total - records.v_series,
        i=records.v_series / params.r_series,
    )


def from_vi_trace(trace: VITrace, params: DeviceParams) -> MeasurementRecord:
    """Inverse of to_vi_trace; mainly for synthetic round-trips."""
    v_series = trace.i * params.r_series
    return MeasurementRecord(t=trace.t.copy(), v_total=trace.v + v_series, v_series=v_series)


def align_time(trace: VITrace, config: AlignmentConfig) -> VITrace:
    """Discard leading samples up to the minimum |v| and trim to n_period.

    The discard index is searched within the first n_discard_max samples; the
    result is exactly n_period samples long.
    """
    n = len(trace)
    if n < config.n_period:
        raise InvalidArgumentError(f"trace has {n} samples; n_period is {config.n_period}")
    window = config.n_discard_max if config.n_discard_max is not None else max(1, n // 10)
    window = min(max(1, window), n)
    discard = int(np.argmin(np.abs(trace.v[:window])))
    if n - discard < config.n_period:
        raise InvalidArgumentError(
            f"only {n - discard} samples remain after discarding {discard}; n_period is {config.n_period}"
        )
    return trace.slice(discard, discard + config.n_period)


def quadrant_objective(v: np.ndarray, i: np.ndarray) -> float:
    """Sum of |v*i| over samples whose voltage and current signs disagree.

    Zero for a passive device measured without offsets: its VI curve never
    enters the upper-left or lower-right quadrants.
    """
    return float(np.sum(np.maximum(0.0, -(np.asarray(v) * np.asarray(i)))))


def _anchor_offsets(v: np.ndarray, i: np.ndarray) -> tuple[float, float]:
    # dv from sweep symmetry: a symmetric sweep about zero has midrange equal
    # to the voltage offset.  di from the interpolated current where the
    # corrected voltage crosses zero (a passive device has i = 0 there).
    dv = -0.5 * (np.max(v) + np.min(v))
    vc = v + dv
    sign_change = np.nonzero(vc[:-1] * vc[1:] < 0.0)[0]
    crossings = []
    for k in sign_change:
        frac = vc[k] / (vc[k] - vc[k + 1])
        crossings.append(i[k] + frac * (i[k + 1] - i[k]))
    exact_zero = np.nonzero(vc == 0.0)[0]
    crossings.extend(i[k] for k in exact_zero)
    if not crossings:
        raise InvalidArgumentError("trace does not span both voltage polarities; cannot locate offsets")
    di = -float(np.mean(crossings))
    return float(dv), di


def correct_offset(trace: VITrace, config: AlignmentConfig) -> tuple[VITrace, OffsetCorrection]:
    """Find and remove additive (dv, di) offsets via the quadrant objective.

    The objective alone cannot separate offset pairs that shift the operating
    point along the device curve, so the search is anchored at an estimate
    from sweep symmetry (the trace is assumed to sweep symmetrically about the
    true zero) before coordinate descent refines it.  Descent alternates dv
    and di moves with geometric step shrinkage and stops once the step falls
    below tol * amplitude.
    """
    v, i = trace.v, trace.i
    amp_v = 0.5 * (np.max(v) - np.min(v))
    amp_i = 0.5 * (np.max(i) - np.min(i))
    if amp_v <= 0.0 or amp_i <= 0.0:
        raise InvalidArgumentError("trace voltage and current must both vary")
    j_before = quadrant_objective(v, i)

    dv, di = _anchor_offsets(v, i)
    bound_v = config.offset_search_range if config.offset_search_range is not None else 0.2 * amp_v
    bound_i = bound_v * (amp_i / amp_v)
    dv = float(np.clip(dv, -bound_v, bound_v))
    di = float(np.clip(di, -bound_i, bound_i))

    best = quadrant_objective(v + dv, i + di)
    if best > j_before:
        # The anchor assumes a symmetric sweep; fall back to the uncorrected
        # point when that assumption misleads it.
        dv, di, best = 0.0, 0.0, j_before
    step_v = 0.05 * amp_v
    step_i = 0.05 * amp_i
    min_step = config.tol
    iterations = 0
    while iterations < config.max_iterations and (step_v > min_step * amp_v or step_i > min_step * amp_i):
        iterations += 1
        improved = False
        for sign in (+1.0, -1.0):
            cand = float(np.clip(dv + sign * step_v, -bound_v, bound_v))
            j = quadrant_objective(v + cand, i + di)
            if j < best:
                dv, best, improved = cand, j, True
                break
        for sign in (+1.0, -1.0):
            cand = float(np.clip(di + sign * step_i, -bound_i, bound_i))
            j = quadrant_objective(v + dv, i + cand)
            if j < best:
                di, best, improved = cand, j, True
                break
        if not improved:
            step_v *= 0.5
            step_i *= 0.5

    if best > j_before:
        raise OffsetConvergenceError(
            f"offset search ended above the uncorrected objective ({best:.3e} > {j_before:.3e})",
            dv=dv,
            di=di,
            objective=best,
        )
    corrected = VITrace(t=trace.t.copy(), v=v + dv, i=i + di)
    return corrected, OffsetCorrection(
        dv=dv, di=di, objective_before=j_before, objective_after=best, iterations=iterations
    )


def segment_cycle(
    trace: VITrace,
    schedule: WaveformSchedule,
    sample_rate: float,
) -> list[tuple[str, int, int]]:
    """Index ranges (label, start, stop) of each segment of one composite cycle.

    The trace must match the schedule's cycle length at sample_rate to within
    one sample; the final segment absorbs the residual so segments partition
    the trace exactly.
    """
    counts = _segment_sample_counts(schedule, sample_rate)
    n_expected = sum(c for _, c in counts)
    if abs(len(trace) - n_expected) > 1:
        raise InvalidArgumentError(
            f"trace has {len(trace)} samples but the schedule implies {n_expected} (tolerance 1)"
        )
    segments = []
    start = 0
    for label, count in counts:
        segments.append((label, start, start + count))
        start += count
    label, seg_start, _ = segments[-1]
    segments[-1] = (label, seg_start, len(trace))
    return segments


def extract_segments(trace: VITrace, segments: list[tuple[str, int, int]]) -> dict[str, VITrace]:
    """Slice a segmented trace into per-label traces."""
    return {label: trace.slice(start, stop) for label, start, stop in segments}


def pool_traces(traces: "list[VITrace] | tuple[VITrace, ...]") -> VITrace:
    """Concatenate traces onto one strictly increasing time axis.

    Each trace is re-based to continue one sample step after the previous
    one; only the VI pairs matter to downstream estimation.
    """
    if len(traces) == 0:
        raise InvalidArgumentError("cannot pool zero traces")
    t_parts, v_parts, i_parts = [], [], []
    offset = 0.0
    for trace in traces:
        t_parts.append(trace.t - trace.t[0] + offset)
        v_parts.append(trace.v)
        i_parts.append(trace.i)
        step = trace.t[1] - trace.t[0] if len(trace) > 1 else 1.0
        offset = t_parts[-1][-1] + step
    return VITrace(t=np.concatenate(t_parts), v=np.concatenate(v_parts), i=np.concatenate(i_parts))


def pulse_energy(trace: VITrace) -> float:
    """Trapezoidal integral of v(t) * i(t) over the trace, in joules."""
    if len(trace) < 2:
        raise InvalidArgumentError("pulse energy needs at least 2 samples")
    return float(np.trapezoid(trace.v * trace.i, trace.t))


def validity_mask(trace: VITrace, max_abs_v: float = 10.0, max_abs_i: float = 1.0) -> np.ndarray:
    """Mask of samples that are finite and within plausible amplitude limits."""
    return (
        np.isfinite(trace.v)
        & np.isfinite(trace.i)
        & (np.abs(trace.v) <= max_abs_v)
        & (np.abs(trace.i) <= max_abs_i)
    )
