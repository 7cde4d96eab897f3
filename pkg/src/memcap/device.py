"""VI/state model and minimum-variance state estimation for SDC memristors.

The device is described by a multiplicative state variable ``x`` acting on a
fixed nonlinear conductance curve: ``i = x * (g_m * v + i_diode(v))``.  States
are reported to callers as ``r = 1 / x`` in ohms (a scaled approximate
resistance, valid for low-magnitude read voltages).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DegenerateTraceError, InvalidArgumentError

if TYPE_CHECKING:
    from .signals import VITrace

# Current-magnitude floor below which a VI pair carries no usable state
# information (division by the conductance term would blow up).
DEFAULT_DENOMINATOR_EPS = 1e-12


@dataclass(frozen=True)
class DeviceParams:
    """Constants of the device VI relation plus the series resistor value.

    alpha_1/alpha_2 are in amps, beta_1/beta_2 in 1/volt, g_m is the
    dimensionless conductance scale and r_series is in ohms.
    """

    g_m: float
    alpha_1: float
    alpha_2: float
    beta_1: float
    beta_2: float
    r_series: float = 1.0e5

    def __post_init__(self):
        for name in ("g_m", "alpha_1", "alpha_2", "beta_1", "beta_2", "r_series"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise InvalidArgumentError(f"{name} must be strictly positive and finite, got {value!r}")

    @classmethod
    def knowm_sdc(cls, r_series: float = 1.0e5) -> "DeviceParams":
        """Fitted constants for the Knowm W+SDC (tungsten-doped Ge2Se3) device."""
        return cls(
            g_m=4.207,
            alpha_1=2.73e-3,
            alpha_2=1.313e-7,
            beta_1=13.92,
            beta_2=2.327e-6,
            r_series=r_series,
        )


@dataclass(frozen=True)
class EstimationWeights:
    """Per-pair normalized weights c and unnormalized precisions k."""

    c: np.ndarray
    k: np.ndarray


@dataclass(frozen=True)
class StateEstimate:
    """Weighted state estimate for one trace.

    ``r_reported`` is 1/x in ohms.  ``variance_proxy`` is 1 / sum(k) and only
    supports relative uncertainty comparison between estimates, it is not a
    calibrated variance.  ``excluded_pairs`` counts VI pairs dropped because
    their conductance denominator was below the filter epsilon.
    """

    x: float
    r_reported: float
    variance_proxy: float
    excluded_pairs: int = 0


def diode_current(v, params: DeviceParams):
    """Diode component of the device current at voltage ``v`` (volts).

    Accepts a scalar or array; returns the same shape.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise InvalidArgumentError("voltage must be finite")
    out = params.alpha_1 * np.expm1(params.beta_1 * v) - params.alpha_2 * np.expm1(-params.beta_2 * v)
    return out if out.ndim else float(out)


def conductance_denominator(v, params: DeviceParams):
    """g_m * v + i_diode(v): the per-unit-state current at voltage ``v``."""
    v = np.asarray(v, dtype=float)
    out = params.g_m * v + diode_current(v, params)
    return out if out.ndim else float(out)


def memristor_current(x, v, params: DeviceParams):
    """Device current at state ``x`` and voltage ``v``; exactly linear in x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise InvalidArgumentError("state x must be non-negative")
    out = x * conductance_denominator(v, params)
    return out if out.ndim else float(out)


def low_voltage_resistance(x: float, params: DeviceParams) -> float:
    """Physical small-signal resistance 1 / (x * g_m) in ohms.

    This is the exact low-voltage limit; the package otherwise reports the
    scaled convention r = 1 / x.
    """
    if x <= 0.0:
        raise InvalidArgumentError("state x must be strictly positive")
    return 1.0 / (x * params.g_m)


def estimation_weights(
    trace: "VITrace",
    params: DeviceParams,
    denominator_eps: float = DEFAULT_DENOMINATOR_EPS,
) -> tuple[EstimationWeights, np.ndarray]:
    """Weights for each retained VI pair, plus the retention mask.

    Pairs whose denominator magnitude is below ``denominator_eps`` (amps) are
    excluded.  Weights are proportional to the squared denominator, i.e. the
    inverse variance of the per-pair state estimate under additive current
    noise, and normalize to 1.
    """
    if len(trace.v) == 0:
        raise InvalidArgumentError("trace has no measurement pairs")
    denom = conductance_denominator(trace.v, params)
    keep = np.abs(denom) >= denominator_eps
    if not np.any(keep):
        raise DegenerateTraceError("all VI pairs filtered: denominators below epsilon")
    k = denom[keep] ** 2
    c = k / np.sum(k)
    return EstimationWeights(c=c, k=k), keep


def estimate_state(
    trace: "VITrace",
    params: DeviceParams,
    denominator_eps: float = DEFAULT_DENOMINATOR_EPS,
) -> StateEstimate:
    """Minimum-variance state estimate from a trace of VI pairs.

    Each retained pair yields the per-pair estimate i_n / (g_m*v_n + i_d(v_n));
    pairs are combined with precision weights so higher-magnitude (lower
    relative noise) pairs dominate.
    """
    weights, keep = estimation_weights(trace, params, denominator_eps)
    denom = conductance_denominator(trace.v, params)[keep]
    per_pair = trace.i[keep] / denom
    x = float(np.sum(weights.c * per_pair))
    if not np.isfinite(x) or x <= 0.0:
        raise DegenerateTraceError(f"state estimate is not a positive finite value: {x!r}")
    return StateEstimate(
        x=x,
        r_reported=1.0 / x,
        variance_proxy=float(1.0 / np.sum(weights.k)),
        excluded_pairs=int(len(trace.v) - np.count_nonzero(keep)),
    )
