"""Delay-conditioned storage channel: drift sampling, quantisation, estimation.

The storage channel treats a written state as the channel input and the state
read back after a delay as the output.  Channel matrices are estimated by
Monte Carlo over a drift sampler, which is either the built-in mean-reverting
reference process (an analytically checkable stand-in) or an empirical
resampler over drift samples ingested from an external generative model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .energyfit import EnergyCostModel, KNOWM_SDC_B, energy_cost
from .errors import ChannelEstimationError, IngestError, InvalidArgumentError

# Drift sampler protocol: (r_init_ohms, delay_minutes, n_draws, rng) -> n final states.
DriftSampler = Callable[[float, float, int, np.random.Generator], np.ndarray]

DRIFT_SAMPLE_HEADER = "r_init_ohms,delay_min,r_final_ohms"


@dataclass(frozen=True)
class RetentionSeries:
    """States estimated at successive times while a device relaxes untouched."""

    t: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if len(t) != len(r):
            raise InvalidArgumentError("t and r must have equal lengths")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise InvalidArgumentError("sample times must be strictly increasing")
        if np.any(r <= 0.0) or not np.all(np.isfinite(r)):
            raise InvalidArgumentError("states must be positive and finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class DriftSample:
    """One (written state, delay, read-back state) triple."""

    r_init: float
    delay: float
    r_final: float

    def __post_init__(self):
        for name in ("r_init", "delay", "r_final"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise InvalidArgumentError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class QuantisationGrid:
    """q equal-width bins on [lo, hi] with bin centres as symbol levels."""

    lo: float
    hi: float
    q: int
    centroids: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.lo >= self.hi:
            raise InvalidArgumentError("grid requires lo < hi")
        if self.q < 2:
            raise InvalidArgumentError("grid requires q >= 2")
        width = (self.hi - self.lo) / self.q
        centroids = self.lo + (np.arange(self.q) + 0.5) * width
        object.__setattr__(self, "centroids", centroids)

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.q

    def same_bins(self, other: "QuantisationGrid") -> bool:
        return self.lo == other.lo and self.hi == other.hi and self.q == other.q


@dataclass(frozen=True)
class ReferenceDriftParams:
    """Log-space mean-reverting drift toward the equilibrium resistance."""

    equilibrium: float = KNOWM_SDC_B
    reversion_rate: float = 0.05
    volatility: float = 0.1

    def __post_init__(self):
        if self.equilibrium <= 0.0 or not np.isfinite(self.equilibrium):
            raise InvalidArgumentError("equilibrium must be positive")
        if self.reversion_rate < 0.0 or self.volatility < 0.0:
            raise InvalidArgumentError("reversion_rate and volatility must be non-negative")


@dataclass(frozen=True)
class DriftChannelMatrix:
    """Row-stochastic P(output bin | input bin) at one delay, with symbol costs."""

    delay: float
    input_grid: QuantisationGrid
    output_grid: QuantisationGrid
    p: np.ndarray
    costs: np.ndarray
    samples_per_input: int

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        costs = np.asarray(self.costs, dtype=float)
        if p.shape != (self.input_grid.q, self.output_grid.q):
            raise InvalidArgumentError("matrix shape must be (input q, output q)")
        if np.any(p < 0.0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-9):
            raise InvalidArgumentError("rows must be probability vectors (sum 1 within 1e-9)")
        if costs.shape != (self.input_grid.q,) or np.any(costs < 0.0) or not np.all(np.isfinite(costs)):
            raise InvalidArgumentError("costs must be one non-negative finite value per input symbol")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "costs", costs)


def _ou_step(ln_r, theta: float, ln_eq: float, sigma: float, dt: float, noise) -> np.ndarray:
    # Exact transition of the mean-reverting process over dt, so moments match
    # the continuous process for any step size.
    decay = np.exp(-theta * dt)
    if theta > 0.0:
        noise_scale = sigma * np.sqrt((1.0 - decay * decay) / (2.0 * theta))
    else:
        noise_scale = sigma * np.sqrt(dt)
    return ln_eq + (ln_r - ln_eq) * decay + noise_scale * noise


def reference_drift_sample(
    r0: float,
    delay: float,
    params: ReferenceDriftParams,
    rng: np.random.Generator,
    size: int | None = None,
) -> float | np.ndarray:
    """States after relaxing from r0 for ``delay`` minutes.

    ln(r) follows a mean-reverting diffusion toward ln(equilibrium); the exact
    transition kernel is sampled in one jump, so any delay costs one draw.
    Deterministic given the generator state.
    """
    if not np.isfinite(r0) or r0 <= 0.0:
        raise InvalidArgumentError("r0 must be positive and finite")
    if not np.isfinite(delay) or delay < 0.0:
        raise InvalidArgumentError("delay must be non-negative")
    n = 1 if size is None else int(size)
    noise = rng.standard_normal(n)
    ln_r = _ou_step(
        np.full(n, np.log(r0)),
        params.reversion_rate,
        np.log(params.equilibrium),
        params.volatility,
        delay,
        noise,
    )
    out = np.exp(ln_r)
    return float(out[0]) if size is None else out


def reference_drift_series(
    r0: float,
    t: Sequence[float],
    params: ReferenceDriftParams,
    rng: np.random.Generator,
) -> RetentionSeries:
    """A retention series sampled along the time grid ``t`` (minutes)."""
    t = np.asarray(t, dtype=float)
    if len(t) == 0:
        raise InvalidArgumentError("time grid must be nonempty")
    ln_eq = np.log(params.equilibrium)
    ln_r = np.empty(len(t))
    ln_r[0] = np.log(r0)
    for k in range(1, len(t)):
        dt = t[k] - t[k - 1]
        ln_r[k] = _ou_step(ln_r[k - 1], params.reversion_rate, ln_eq, params.volatility, dt, rng.standard_normal())
    return RetentionSeries(t=t, r=np.exp(ln_r))


def reference_sampler(params: ReferenceDriftParams) -> DriftSampler:
    """Adapt the reference drift process to the channel sampler protocol."""

    def sample(r0: float, delay: float, n: int, rng: np.random.Generator) -> np.ndarray:
        return reference_drift_sample(r0, delay, params, rng, size=n)

    return sample


def make_grid(lo: float, hi: float, q: int) -> QuantisationGrid:
    """Quantisation grid of q equal-width bins on the inclusive range [lo, hi]."""
    return QuantisationGrid(lo=lo, hi=hi, q=q)


def quantise_value(r, grid: QuantisationGrid):
    """Bin index of r; out-of-range values clamp into the boundary bins."""
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)):
        raise InvalidArgumentError("values to quantise must be finite")
    idx = np.floor((r - grid.lo) / grid.width).astype(int)
    idx = np.clip(idx, 0, grid.q - 1)
    return idx if idx.ndim else int(idx)


def estimate_channel(
    sampler: DriftSampler,
    input_grid: QuantisationGrid,
    output_grid: QuantisationGrid,
    delay: float,
    n: int,
    energy_model: EnergyCostModel,
    seed: int,
) -> DriftChannelMatrix:
    """Monte Carlo estimate of the channel matrix at one delay.

    Each input level draws n outcomes from the sampler and bins them; rows are
    the resulting relative frequencies.  Every input level owns an RNG stream
    derived from (seed, input index) so results do not depend on evaluation
    order.  Symbol costs come from the energy model at the input centroids.
    """
    if n < 1:
        raise InvalidArgumentError("n must be at least 1")
    p = np.zeros((input_grid.q, output_grid.q))
    for x, centroid in enumerate(input_grid.centroids):
        rng = np.random.default_rng([seed, x])
        try:
            draws = np.asarray(sampler(float(centroid), delay, n, rng), dtype=float)
        except InvalidArgumentError:
            raise
        except Exception as exc:
            raise ChannelEstimationError(f"sampler failed at input index {x}: {exc}", input_index=x) from exc
        if draws.shape != (n,):
            raise ChannelEstimationError(
                f"sampler returned shape {draws.shape} at input index {x}, expected ({n},)",
                input_index=x,
            )
        bins = quantise_value(draws, output_grid)
        p[x] = np.bincount(bins, minlength=output_grid.q) / n
    costs = energy_cost(input_grid.centroids, energy_model)
    return DriftChannelMatrix(
        delay=delay,
        input_grid=input_grid,
        output_grid=output_grid,
        p=p,
        costs=costs,
        samples_per_input=n,
    )


def empirical_sampler(samples: Sequence[DriftSample], rel_tol: float = 1e-9) -> DriftSampler:
    """Sampler that resamples ingested (r_init, delay) cells with replacement.

    Raises KeyError (wrapped by estimate_channel) when asked for a cell that
    has no samples within relative tolerance.
    """
    cells: dict[tuple[float, float], list[float]] = {}
    for s in samples:
        cells.setdefault((s.r_init, s.delay), []).append(s.r_final)
    keys = np.array(list(cells.keys())) if cells else np.empty((0, 2))
    pools = {k: np.array(v) for k, v in cells.items()}

    def sample(r0: float, delay: float, n: int, rng: np.random.Generator) -> np.ndarray:
        if len(keys) == 0:
            raise KeyError("no drift samples available")
        close = (np.abs(keys[:, 0] - r0) <= rel_tol * max(abs(r0), 1.0)) & (
            np.abs(keys[:, 1] - delay) <= rel_tol * max(abs(delay), 1.0)
        )
        match = np.nonzero(close)[0]
        if len(match) == 0:
            raise KeyError(f"no drift samples for r_init={r0!r}, delay={delay!r}")
        pool = np.concatenate([pools[tuple(keys[m])] for m in match])
        return rng.choice(pool, size=n, replace=True)

    return sample


def ingest_drift_samples(path) -> tuple[list[DriftSample], list[tuple[int, str]]]:
    """Read a drift-sample interchange CSV.

    Returns (samples, rejected) where rejected holds (1-based line number,
    reason) for each malformed row.  A missing file or wrong header raises
    IngestError.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IngestError(f"cannot read drift samples from {path}: {exc}") from exc
    content = [(no, line) for no, line in enumerate(lines, start=1) if line.strip() and not line.lstrip().startswith("#")]
    if not content:
        raise IngestError(f"{path}: empty file, expected header '{DRIFT_SAMPLE_HEADER}'")
    header_no, header = content[0]
    if header.strip() != DRIFT_SAMPLE_HEADER:
        raise IngestError(f"{path}:{header_no}: expected header '{DRIFT_SAMPLE_HEADER}', got '{header.strip()}'")
    samples: list[DriftSample] = []
    rejected: list[tuple[int, str]] = []
    for no, line in content[1:]:
        parts = line.split(",")
        if len(parts) != 3:
            rejected.append((no, f"expected 3 fields, got {len(parts)}"))
            continue
        try:
            values = [float(p) for p in parts]
        except ValueError:
            rejected.append((no, "non-numeric field"))
            continue
        try:
            samples.append(DriftSample(r_init=values[0], delay=values[1], r_final=values[2]))
        except InvalidArgumentError as exc:
            rejected.append((no, str(exc)))
    return samples, rejected
