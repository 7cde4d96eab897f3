"""Synthetic measurement generation: the device in series with its resistor.

Replaces the physical experiment.  Given a command waveform applied across
the circuit, the memristor voltage at each sample solves
``v + r_series * i(x, v) = v_total``, which is monotone in v and bracketed by
0 and v_total for a passive device, so bisection is exact and robust.

Post-SET states are chosen so the measured SET energy lands on the energy
cost curve (optionally with multiplicative noise), which makes the synthetic
experiment self-consistent: refitting the cost model on simulated cycles
recovers its parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceParams, conductance_denominator
from .energyfit import EnergyCostModel
from .errors import InvalidArgumentError
from .signals import (
    DEFAULT_EDGE_FRACTION,
    MeasurementRecord,
    VITrace,
    WaveformSchedule,
    cycle_segment_labels,
    synthesize_waveform,
)

_BISECTION_STEPS = 60


def solve_memristor_voltage(v_total, x: float, params: DeviceParams) -> np.ndarray:
    """Memristor voltage for each commanded total voltage at fixed state x."""
    v_total = np.atleast_1d(np.asarray(v_total, dtype=float))
    if x < 0.0:
        raise InvalidArgumentError("state x must be non-negative")
    lo = np.minimum(0.0, v_total)
    hi = np.maximum(0.0, v_total)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        f = mid + params.r_series * x * conductance_denominator(mid, params) - v_total
        lo = np.where(f < 0.0, mid, lo)
        hi = np.where(f < 0.0, hi, mid)
    return 0.5 * (lo + hi)


def _segment_energy(v_cmd: np.ndarray, t: np.ndarray, x: float, params: DeviceParams) -> float:
    v = solve_memristor_voltage(v_cmd, x, params)
    i = x * conductance_denominator(v, params)
    return float(np.trapezoid(v * i, t))


def solve_set_state(
    set_cmd: np.ndarray,
    t_set: np.ndarray,
    target_energy_model: EnergyCostModel,
    params: DeviceParams,
    energy_scale: float = 1.0,
    x_hi: float = 1e-2,
) -> float:
    """State x after a SET pulse, consistent with the energy cost curve.

    Solves measured_energy(x) == energy_scale * a * ln(b * x) by bisection in
    ln x.  The left side decreases with x (the series resistor takes over as
    the device conducts more) while the right side increases, so the crossing
    is unique.
    """
    a, b = target_energy_model.a, target_energy_model.b
    ln_lo = np.log(1.0 / b) + 1e-9
    ln_hi = np.log(x_hi)

    def gap(ln_x: float) -> float:
        x = np.exp(ln_x)
        return _segment_energy(set_cmd, t_set, x, params) - energy_scale * a * (np.log(b) + ln_x)

    if gap(ln_lo) <= 0.0:
        return float(np.exp(ln_lo))
    if gap(ln_hi) >= 0.0:
        raise InvalidArgumentError("SET pulse energy exceeds the cost curve over the whole state range")
    for _ in range(_BISECTION_STEPS):
        ln_mid = 0.5 * (ln_lo + ln_hi)
        if gap(ln_mid) > 0.0:
            ln_lo = ln_mid
        else:
            ln_hi = ln_mid
    return float(np.exp(0.5 * (ln_lo + ln_hi)))


@dataclass(frozen=True)
class SimulatedCycle:
    """Ground truth for one simulated composite cycle."""

    records: MeasurementRecord
    x_pre: float
    x_post: float
    set_energy: float


def simulate_cycle_records(
    schedule: WaveformSchedule,
    params: DeviceParams,
    energy_model: EnergyCostModel,
    sample_rate: float,
    rng: np.random.Generator | None = None,
    programming_noise: float = 0.0,
    read_noise: float = 0.0,
    dv_offset: float = 0.0,
    di_offset: float = 0.0,
    lead_in: int = 0,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
) -> SimulatedCycle:
    """Measurement records for one RESET / reads / SET / reads cycle.

    The device sits at equilibrium (x = 1/b) until the SET pulse switches it
    to the energy-consistent post state.  programming_noise perturbs the
    target SET energy multiplicatively; read_noise adds white current noise
    (amps rms).  dv_offset/di_offset inject device-frame offsets into the
    recorded channels, and lead_in prepends that many pre-trigger samples for
    the alignment stage to discard.
    """
    if (programming_noise > 0.0 or read_noise > 0.0) and rng is None:
        raise InvalidArgumentError("noise injection requires an rng")
    x_pre = 1.0 / energy_model.b

    labels = cycle_segment_labels(schedule)
    parts = [
        synthesize_waveform(lab if lab in ("reset", "set") else "read", schedule, sample_rate, edge_fraction)
        for lab in labels
    ]
    set_index = labels.index("set")
    set_cmd = parts[set_index]
    t_set = np.arange(len(set_cmd)) / sample_rate

    energy_scale = 1.0
    if programming_noise > 0.0:
        energy_scale = max(0.05, 1.0 + programming_noise * rng.standard_normal())
    x_post = solve_set_state(set_cmd, t_set, energy_model, params, energy_scale=energy_scale)

    v_parts, i_parts = [], []
    for k, cmd in enumerate(parts):
        x = x_pre if k < set_index else x_post
        v = solve_memristor_voltage(cmd, x, params)
        i = x * conductance_denominator(v, params)
        v_parts.append(v)
        i_parts.append(i)
    set_energy = float(np.trapezoid(v_parts[set_index] * i_parts[set_index], t_set))

    v = np.concatenate(v_parts)
    i = np.concatenate(i_parts)
    if lead_in > 0:
        # Pre-trigger tail decaying toward zero but held at 10% of the read
        # amplitude, so the alignment minimum stays at the true cycle start
        # even with channel offsets injected on top.
        ramp = -schedule.a_read * np.linspace(1.0, 0.1, lead_in)
        v = np.concatenate([ramp, v])
        i = np.concatenate([x_pre * conductance_denominator(ramp, params), i])
    if read_noise > 0.0:
        i = i + read_noise * rng.standard_normal(len(i))

    t = np.arange(len(v)) / sample_rate
    v_series = (i + di_offset) * params.r_series
    v_total = (v + dv_offset) + v_series
    records = MeasurementRecord(t=t, v_total=v_total, v_series=v_series)
    return SimulatedCycle(records=records, x_pre=x_pre, x_post=x_post, set_energy=set_energy)


def ohmic_trace(resistance: float, amplitude: float, n: int, period: float = 1e-3) -> VITrace:
    """Noise-free triangular sweep across an ohmic resistor; test fixture."""
    schedule = WaveformSchedule(a_read=amplitude, t_read=period)
    v = synthesize_waveform("read", schedule, n / period)
    t = np.arange(len(v)) * (period / n)
    return VITrace(t=t, v=v, i=v / resistance)


def device_trace(x: float, params: DeviceParams, amplitude: float, n: int, period: float = 1e-3) -> VITrace:
    """Noise-free triangular sweep across the modelled device; test fixture."""
    schedule = WaveformSchedule(a_read=amplitude, t_read=period)
    v = synthesize_waveform("read", schedule, n / period)
    t = np.arange(len(v)) * (period / n)
    return VITrace(t=t, v=v, i=x * conductance_denominator(v, params))
