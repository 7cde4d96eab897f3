"""Logarithmic programming-energy cost model and its least-squares fit.

The energy to program the device from its equilibrium (resting) state into a
target state r follows |a * ln|b / r||, where b is the equilibrium resistance
and a sets the energy scale.  Observations collected by SET pulses lie on the
r < b branch (programming lowers resistance), so fitting uses the signed
residual e - a * ln(b / r) and checks branch validity afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .device import DeviceParams, estimate_state
from .errors import FitConvergenceError, InvalidArgumentError, UnderdeterminedFitError
from .signals import VITrace, pool_traces, pulse_energy

# Equilibrium resistance and energy scale fitted for the Knowm W+SDC device.
KNOWM_SDC_A = 2.39506e-4
KNOWM_SDC_B = 7.1853e6

_N_MULTISTART = 8
_MAX_GN_ITER = 200


@dataclass(frozen=True)
class PhysicalDecomposition:
    """Optional physical reading of the fit parameters (metadata only)."""

    r_eq: float
    r_final: float
    tau_final: float


@dataclass(frozen=True)
class EnergyCostModel:
    """Parameters of the logarithmic energy cost curve."""

    a: float
    b: float
    decomposition: PhysicalDecomposition | None = None

    def __post_init__(self):
        if not np.isfinite(self.a):
            raise InvalidArgumentError("a must be finite")
        if not np.isfinite(self.b) or self.b <= 0.0:
            raise InvalidArgumentError("b must be strictly positive")
        if self.decomposition is not None and self.decomposition.r_eq != self.b:
            raise InvalidArgumentError("decomposition r_eq must equal b")

    @classmethod
    def knowm_sdc(cls) -> "EnergyCostModel":
        return cls(a=KNOWM_SDC_A, b=KNOWM_SDC_B)


@dataclass(frozen=True)
class EnergyObservation:
    """One programmed state (reported-resistance convention) and its SET energy."""

    r: float
    e: float

    def __post_init__(self):
        if not np.isfinite(self.r) or self.r <= 0.0:
            raise InvalidArgumentError("r must be strictly positive")
        if not np.isfinite(self.e) or self.e < 0.0:
            raise InvalidArgumentError("e must be non-negative")


@dataclass(frozen=True)
class FitDiagnostics:
    rss: float
    iterations: int
    residuals: np.ndarray
    branch_valid: bool


def energy_cost(r, model: EnergyCostModel):
    """Energy in joules to program from equilibrium into state r (ohms)."""
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
        raise InvalidArgumentError("r must be strictly positive and finite")
    out = np.abs(model.a * np.log(np.abs(model.b / r)))
    return out if out.ndim else float(out)


def _signed_residuals(a: float, ln_b: float, ln_r: np.ndarray, e: np.ndarray) -> np.ndarray:
    return e - a * (ln_b - ln_r)


def _profiled_a(ln_b: float, ln_r: np.ndarray, e: np.ndarray) -> float:
    # For fixed b the model is linear in a; start each local fit at the
    # closed-form least-squares a.
    basis = ln_b - ln_r
    denom = float(basis @ basis)
    if denom == 0.0:
        return 0.0
    return float((e @ basis) / denom)


def _gauss_newton(
    a0: float, ln_b0: float, ln_r: np.ndarray, e: np.ndarray
) -> tuple[float, float, float, int]:
    # Work on (a / e_scale, ln_b) with residuals in units of e_scale, so both
    # Jacobian columns are O(1) and convergence tests are scale-free.
    e_scale = float(np.max(e)) or 1.0
    e_unit = e / e_scale
    alpha, ln_b = a0 / e_scale, ln_b0
    res = _signed_residuals(alpha, ln_b, ln_r, e_unit)
    rss = float(res @ res)
    iterations = 0
    for _ in range(_MAX_GN_ITER):
        iterations += 1
        jac = np.column_stack([-(ln_b - ln_r), np.full_like(ln_r, -alpha)])
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        damping = 1.0
        improved = False
        for _ in range(40):
            alpha_new, ln_b_new = alpha + damping * step[0], ln_b + damping * step[1]
            res_new = _signed_residuals(alpha_new, ln_b_new, ln_r, e_unit)
            rss_new = float(res_new @ res_new)
            if rss_new <= rss:
                improved = rss - rss_new > 1e-14 * rss
                alpha, ln_b, res, rss = alpha_new, ln_b_new, res_new, rss_new
                break
            damping *= 0.5
        else:
            break
        if not improved:
            break
    return alpha * e_scale, ln_b, rss * e_scale * e_scale, iterations


def fit_energy_model(
    observations: Sequence[EnergyObservation],
    init: EnergyCostModel | None = None,
) -> tuple[EnergyCostModel, FitDiagnostics]:
    """Fit (a, b) of the cost curve by damped Gauss-Newton with multi-start.

    The optimisation runs on (a, ln b) so b stays positive, starting from
    eight ln b values spanning the observed resistance range (plus the caller
    init, when given), and keeps the lowest residual sum of squares.

    Raises UnderdeterminedFitError for fewer than two distinct resistances and
    FitConvergenceError (carrying the best model) when no start converges.
    """
    r = np.array([ob.r for ob in observations], dtype=float)
    e = np.array([ob.e for ob in observations], dtype=float)
    if len(np.unique(r)) < 2:
        raise UnderdeterminedFitError("need at least 2 observations with distinct r values")
    ln_r = np.log(r)

    starts = [(None, float(ln_b0)) for ln_b0 in np.linspace(ln_r.min(), ln_r.max(), _N_MULTISTART)]
    if init is not None:
        starts.append((init.a, float(np.log(init.b))))

    best = None
    total_iterations = 0
    for a0, ln_b0 in starts:
        if a0 is None:
            a0 = _profiled_a(ln_b0, ln_r, e)
        a, ln_b, rss, iterations = _gauss_newton(a0, ln_b0, ln_r, e)
        total_iterations += iterations
        if np.isfinite(rss) and (best is None or rss < best[2]):
            best = (a, ln_b, rss)
    if best is None:
        raise FitConvergenceError("no Gauss-Newton start produced a finite fit")
    a, ln_b, rss = best

    model = EnergyCostModel(a=a, b=float(np.exp(ln_b)))
    residuals = _signed_residuals(a, ln_b, ln_r, e)
    diagnostics = FitDiagnostics(
        rss=rss,
        iterations=total_iterations,
        residuals=residuals,
        branch_valid=bool(np.all(r < model.b)),
    )
    return model, diagnostics


@dataclass(frozen=True)
class SegmentedCycle:
    """Per-segment traces of one composite cycle, ready for assembly."""

    set_segment: VITrace
    reads_post: tuple[VITrace, ...]


def observations_from_cycles(
    cycles: Iterable[SegmentedCycle],
    params: DeviceParams,
) -> list[EnergyObservation]:
    """Pair each cycle's SET pulse energy with its post-SET state estimate.

    Post-SET READ segments are pooled into a single estimation trace so the
    weighting spans every available pair.
    """
    observations = []
    for cycle in cycles:
        if len(cycle.reads_post) == 0:
            raise InvalidArgumentError("cycle has no post-SET READ segments")
        energy = pulse_energy(cycle.set_segment)
        state = estimate_state(pool_traces(cycle.reads_post), params)
        observations.append(EnergyObservation(r=state.r_reported, e=max(0.0, energy)))
    return observations
