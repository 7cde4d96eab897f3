"""Mutual information and cost-constrained Blahut-Arimoto capacity curves.

All iteration happens in natural logs; bits appear only at the interfaces.
The cost constraint enters through an exponential tilt parameterised by
s >= 0: each Blahut update maximises mutual information minus s times the
expected symbol cost, so sweeping s traces out the capacity-cost curve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .drift import DriftChannelMatrix
from .errors import InvalidArgumentError

log = logging.getLogger(__name__)

LN2 = float(np.log(2.0))

DEFAULT_TOL_BITS = 1e-6
DEFAULT_MAX_ITER = 10000

# Input-distribution masses below this are treated as exact zeros on output.
MASS_FLOOR = 1e-15


@dataclass(frozen=True)
class ChannelSpec:
    """A row-stochastic transition matrix with per-input-symbol costs."""

    p: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        costs = np.asarray(self.costs, dtype=float)
        if p.ndim != 2:
            raise InvalidArgumentError("transition matrix must be 2-dimensional")
        if np.any(p < 0.0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-9):
            raise InvalidArgumentError("matrix rows must sum to 1 within 1e-9 and be non-negative")
        if costs.shape != (p.shape[0],):
            raise InvalidArgumentError("need exactly one cost per input symbol")
        if np.any(costs < 0.0) or not np.all(np.isfinite(costs)):
            raise InvalidArgumentError("costs must be finite and non-negative")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "costs", costs)

    @property
    def q_in(self) -> int:
        return self.p.shape[0]

    @property
    def q_out(self) -> int:
        return self.p.shape[1]

    @classmethod
    def from_drift_matrix(cls, matrix: DriftChannelMatrix) -> "ChannelSpec":
        return cls(p=matrix.p, costs=matrix.costs)


@dataclass(frozen=True)
class CapacityCurvePoint:
    """One point of the capacity-cost trade-off.

    gap is the termination certificate in bits: an upper bound on how far
    capacity sits below the true optimum of the tilted objective.
    """

    s: float
    avg_energy: float
    capacity: float
    input_distribution: np.ndarray
    iterations: int
    gap: float
    converged: bool


def _validate_input_distribution(p_input: np.ndarray, q_in: int) -> np.ndarray:
    p_input = np.asarray(p_input, dtype=float)
    if p_input.shape != (q_in,):
        raise InvalidArgumentError(f"input distribution must have shape ({q_in},)")
    if np.any(p_input < 0.0) or abs(float(p_input.sum()) - 1.0) > 1e-9:
        raise InvalidArgumentError("input distribution must be non-negative and sum to 1 within 1e-9")
    return p_input


def mutual_information(p_input: np.ndarray, channel: ChannelSpec) -> float:
    """I(X;Y) in bits between the channel input and output, 0*log(0) == 0."""
    p_input = _validate_input_distribution(p_input, channel.q_in)
    p = channel.p
    q = p_input @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log(p) - np.log(q)[None, :]
        terms = np.where(p > 0.0, p * ratio, 0.0)
    per_input = terms.sum(axis=1)
    support = p_input > 0.0
    nats = float(p_input[support] @ per_input[support])
    bits = nats / LN2
    return 0.0 if -1e-12 < bits < 0.0 else bits


def blahut_arimoto(
    channel: ChannelSpec,
    s: float = 0.0,
    tol: float = DEFAULT_TOL_BITS,
    max_iter: int = DEFAULT_MAX_ITER,
    debug: bool = False,
) -> CapacityCurvePoint:
    """Capacity of the channel under the exponential cost tilt s.

    Starting from the uniform input distribution, each iteration computes the
    per-input divergence-minus-cost score
    ``d_x = KL(P(.|x) || q) - s * cost_x`` (nats) against the current output
    marginal q and reweights ``p'(x) ~ p(x) * exp(d_x)``.  Iteration stops when
    the certificate ``(max_x d_x - sum_x p(x) d_x) / ln 2`` drops to tol bits;
    hitting max_iter first yields converged=False rather than an exception.

    With debug=True the tilted objective is asserted non-decreasing, which is
    the defining property of the update.
    """
    if s < 0.0 or not np.isfinite(s):
        raise InvalidArgumentError("s must be finite and non-negative")
    if tol <= 0.0:
        raise InvalidArgumentError("tol must be positive")
    p = channel.p
    m = channel.q_in
    with np.errstate(divide="ignore", invalid="ignore"):
        row_entropy_terms = np.where(p > 0.0, p * np.log(p), 0.0)
    row_neg_entropy = row_entropy_terms.sum(axis=1)

    ln_px = np.full(m, -np.log(m))
    px = np.exp(ln_px)
    gap_bits = np.inf
    objective_prev = -np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        q = px @ p
        # Outputs unreachable under the current input get a floored log so the
        # score stays finite; mass then flows back toward inputs that reach
        # them, which is the correct direction.
        ln_q = np.log(np.maximum(q, 1e-300))
        d = row_neg_entropy - p @ ln_q - s * channel.costs
        objective = float(px @ d)
        if debug and objective < objective_prev - 1e-9 * max(1.0, abs(objective_prev)):
            raise AssertionError(
                f"tilted objective decreased: {objective_prev} -> {objective} at iteration {iterations}"
            )
        objective_prev = objective
        gap_bits = (float(d.max()) - objective) / LN2
        if gap_bits <= tol:
            converged = True
            break
        ln_px = ln_px + d
        ln_px -= np.max(ln_px)
        ln_px -= np.log(np.sum(np.exp(ln_px)))
        px = np.exp(ln_px)

    px = np.where(px < MASS_FLOOR, 0.0, px)
    px = px / px.sum()
    return CapacityCurvePoint(
        s=s,
        avg_energy=float(px @ channel.costs),
        capacity=mutual_information(px, channel),
        input_distribution=px,
        iterations=iterations,
        gap=float(gap_bits),
        converged=converged,
    )


def default_s_grid(count: int = 100, lo: float = 1e-9, hi: float = 1e5, spacing: str = "log") -> np.ndarray:
    """The tilt sweep grid; logarithmic spacing resolves all fourteen decades."""
    if count < 1 or lo <= 0.0 or lo >= hi:
        raise InvalidArgumentError("need count >= 1 and 0 < lo < hi")
    if spacing == "log":
        return np.geomspace(lo, hi, count)
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    raise InvalidArgumentError(f"unknown spacing {spacing!r}")


def capacity_cost_curve(
    channel: ChannelSpec,
    s_grid: Sequence[float],
    tol: float = DEFAULT_TOL_BITS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[CapacityCurvePoint]:
    """One converged point per tilt value, sorted by average energy ascending.

    Per-point failures are logged and skipped so one bad tilt cannot abort the
    sweep; non-convergence is not a failure, those points come back flagged.
    """
    s_values = np.asarray(s_grid, dtype=float)
    if len(s_values) == 0:
        raise InvalidArgumentError("s_grid must be nonempty")
    if np.any(s_values < 0.0):
        raise InvalidArgumentError("all s values must be non-negative")
    points = []
    for s in s_values:
        try:
            points.append(blahut_arimoto(channel, s=float(s), tol=tol, max_iter=max_iter))
        except InvalidArgumentError:
            raise
        except Exception:
            log.exception("capacity point failed at s=%r; continuing sweep", s)
    points.sort(key=lambda pt: (pt.avg_energy, pt.s))
    return points


@dataclass(frozen=True)
class DelayCurve:
    delay: float
    points: list[CapacityCurvePoint]


def delay_sweep(
    channels: Sequence[DriftChannelMatrix],
    s_grid: Sequence[float],
    tol: float = DEFAULT_TOL_BITS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> list[DelayCurve]:
    """Capacity-cost curves for channels sharing one input grid and cost vector."""
    if len(channels) == 0:
        raise InvalidArgumentError("need at least one channel")
    first = channels[0]
    for other in channels[1:]:
        if not first.input_grid.same_bins(other.input_grid):
            raise InvalidArgumentError("channels must share the input grid")
        if not np.allclose(first.costs, other.costs, rtol=1e-12, atol=0.0):
            raise InvalidArgumentError("channels must share the input cost vector")
    return [
        DelayCurve(delay=ch.delay, points=capacity_cost_curve(ChannelSpec.from_drift_matrix(ch), s_grid, tol, max_iter))
        for ch in channels
    ]
