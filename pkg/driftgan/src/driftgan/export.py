"""Drift-sample export in the interchange format the channel estimator reads."""

from __future__ import annotations

import numpy as np

from .model import TrainedDriftModel, sample_jump

INTERCHANGE_HEADER = "r_init_ohms,delay_min,r_final_ohms"


def export_samples(
    model: TrainedDriftModel,
    r_grid,
    delays_min,
    n_per_cell: int,
    path,
    seed: int,
) -> int:
    """Write n_per_cell generated outcomes per (initial state, delay) cell.

    Delays are minutes; the model's unit_minutes maps them onto generator
    time units.  Returns the number of rows written.  n_per_cell = 0 yields a
    header-only file.
    """
    r_grid = np.atleast_1d(np.asarray(r_grid, dtype=float))
    delays_min = np.atleast_1d(np.asarray(delays_min, dtype=float))
    if len(r_grid) == 0 or len(delays_min) == 0:
        raise ValueError("r_grid and delays must be nonempty")
    if n_per_cell < 0:
        raise ValueError("n_per_cell must be non-negative")
    unit_minutes = model.config["unit_minutes"]
    rows = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(INTERCHANGE_HEADER + "\n")
        if n_per_cell == 0:
            return 0
        for di, delay in enumerate(delays_min):
            delay_units = float(delay) / unit_minutes
            rng = np.random.default_rng([seed, di])
            finals = sample_jump(model, r_grid, delay_units, n_per_cell, rng)
            for r0, row in zip(r_grid, finals):
                r0_text = format(float(r0), ".17g")
                d_text = format(float(delay), ".17g")
                for value in row:
                    fh.write(f"{r0_text},{d_text},{format(float(value), '.17g')}\n")
                    rows += 1
    return rows
