"""Retention series loading and the bundled synthetic stand-in dataset.

The real retention measurements are not distributable, so the package ships
nine synthetic series produced by a seeded log-space mean-reverting walk
toward the device's equilibrium resistance.  The training metadata records a
hash of whatever data was used, so models trained on the stand-in are
distinguishable from models trained on real measurements.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

RETENTION_HEADER = "t_min,r_ohms"

STANDIN_SEED = 20240915
STANDIN_EQUILIBRIUM = 7.1853e6
STANDIN_REVERSION = 0.05
STANDIN_VOLATILITY = 0.06
STANDIN_MINUTES = 60
# Nine arbitrary initial states; the top one starts above equilibrium so the
# dataset exercises downward drift too.
STANDIN_R0 = (1.5e5, 3e5, 6e5, 1.2e6, 2.5e6, 5e6, 1e7, 3e7, 1e8)


@dataclass(frozen=True)
class RetentionSeries:
    t: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if len(t) != len(r) or len(t) == 0:
            raise ValueError("t and r must be nonempty and equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if np.any(r <= 0) or not np.all(np.isfinite(r)):
            raise ValueError("resistances must be positive and finite")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)

    def __len__(self) -> int:
        return len(self.t)


def make_standin_series(seed: int = STANDIN_SEED) -> list[RetentionSeries]:
    """Regenerate the bundled stand-in dataset (deterministic in the seed)."""
    rng = np.random.default_rng(seed)
    ln_eq = np.log(STANDIN_EQUILIBRIUM)
    decay = np.exp(-STANDIN_REVERSION)
    step_sd = STANDIN_VOLATILITY * np.sqrt((1.0 - decay * decay) / (2.0 * STANDIN_REVERSION))
    out = []
    for r0 in STANDIN_R0:
        ln_r = np.empty(STANDIN_MINUTES)
        ln_r[0] = np.log(r0)
        for k in range(1, STANDIN_MINUTES):
            ln_r[k] = ln_eq + (ln_r[k - 1] - ln_eq) * decay + step_sd * rng.standard_normal()
        out.append(RetentionSeries(t=np.arange(STANDIN_MINUTES, dtype=float), r=np.exp(ln_r)))
    return out


def write_series_csv(path, series: RetentionSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RETENTION_HEADER + "\n")
        for t, r in zip(series.t, series.r):
            fh.write(f"{format(t, '.17g')},{format(r, '.17g')}\n")


def read_series_csv(path) -> RetentionSeries:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    content = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not content or content[0] != RETENTION_HEADER:
        raise ValueError(f"{path}: expected header '{RETENTION_HEADER}'")
    rows = [tuple(float(p) for p in ln.split(",")) for ln in content[1:]]
    arr = np.array(rows)
    return RetentionSeries(t=arr[:, 0], r=arr[:, 1])


def load_series_dir(path) -> list[RetentionSeries]:
    files = sorted(Path(path).glob("*.csv"))
    if not files:
        raise ValueError(f"no retention series CSVs under {path}")
    return [read_series_csv(p) for p in files]


def load_bundled_series() -> list[RetentionSeries]:
    """The nine stand-in series shipped with the package."""
    root = resources.files(__package__) / "data"
    return [read_series_csv(p) for p in sorted(root.iterdir()) if p.name.endswith(".csv")]


def data_hash(series: list[RetentionSeries]) -> str:
    digest = hashlib.sha256()
    for s in series:
        digest.update(np.ascontiguousarray(s.t).tobytes())
        digest.update(np.ascontiguousarray(s.r).tobytes())
    return digest.hexdigest()
