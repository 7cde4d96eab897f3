"""Pipeline configuration: INI file with sections, flag overrides on top.

Precedence: built-in defaults < config file < command-line flags.  The config
hash covers every experiment-relevant key (everything except the output
directory) so runs are auditable: equal hash means equal experiment.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .device import DeviceParams
from .drift import ReferenceDriftParams
from .energyfit import EnergyCostModel, KNOWM_SDC_A, KNOWM_SDC_B
from .errors import ConfigError
from .signals import AlignmentConfig, WaveformSchedule

ENV_CONFIG_PATH = "MEMCAP_CONFIG"

# section -> key -> (parser, default)
_SCHEMA: dict[str, dict[str, tuple]] = {
    "run": {
        "seed": (int, None),
        "out_dir": (str, "out"),
    },
    "device": {
        "g_m": (float, 4.207),
        "alpha_1": (float, 2.73e-3),
        "alpha_2": (float, 1.313e-7),
        "beta_1": (float, 13.92),
        "beta_2": (float, 2.327e-6),
        "r_series": (float, 1.0e5),
    },
    "schedule": {
        "t_reset": (float, 3e-3),
        "t_read": (float, 1e-3),
        "t_set": (float, 2e-3),
        "a_set": (float, 1.0),
        "a_read": (float, 0.2),
        "reset_ratio": (float, 1.0),
        "reads_after_reset": (int, 2),
        "reads_after_set": (int, 3),
    },
    "experiment": {
        "a_set_lo": (float, 0.5),
        "a_set_hi": (float, 1.6),
        "n_amplitudes": (int, 12),
        "repeats": (int, 4),
        "sample_rate": (float, 1e5),
        "edge_fraction": (float, 0.05),
        "programming_noise": (float, 0.05),
        "read_noise": (float, 0.0),
        "inject_dv": (float, 4e-3),
        "inject_di": (float, 2e-8),
        "lead_in": (int, 25),
    },
    "alignment": {
        "n_discard_max": (int, 0),  # 0: auto (10% of trace)
        "offset_search_range": (float, 0.0),  # 0: auto (20% of amplitude)
        "tol": (float, 1e-6),
    },
    "energy": {
        "a": (float, KNOWM_SDC_A),
        "b": (float, KNOWM_SDC_B),
        "gen_a": (float, 2.4e-9),
        "gen_b": (float, KNOWM_SDC_B),
        # Channel symbol costs default to the configured device cost model;
        # the fitted model from the synthetic experiment lives on the circuit
        # energy scale, which the default s sweep is not matched to.
        "use_fitted": (bool, False),
    },
    "drift": {
        "source": (str, "reference"),
        "theta": (float, 0.05),
        "sigma": (float, 0.1),
        "equilibrium": (float, KNOWM_SDC_B),
        "samples_path": (str, ""),
    },
    "grids": {
        "input_lo": (float, 1e5),
        "input_hi": (float, 1e6),
        "input_q": (int, 100),
        "output_lo": (float, 1e5),
        "output_hi": (float, 2e7),
        "output_q": (int, 100),
    },
    "capacity": {
        "delays": (str, "10,50,100"),
        "n": (int, 1000),
        "s_lo": (float, 1e-9),
        "s_hi": (float, 1e5),
        "s_count": (int, 100),
        "s_spacing": (str, "log"),
        "tol": (float, 1e-6),
        "max_iter": (int, 10000),
        "write_distributions": (bool, False),
        "plots": (bool, False),
    },
}

_HASH_EXCLUDED = {("run", "out_dir")}


def _parse_value(parser, raw: str, section: str, key: str):
    if parser is bool:
        lowered = str(raw).strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved configuration for every pipeline stage."""

    values: dict = field(repr=False)

    def get(self, section: str, key: str):
        return self.values[(section, key)]

    @property
    def seed(self) -> int | None:
        return self.get("run", "seed")

    @property
    def out_dir(self) -> Path:
        return Path(self.get("run", "out_dir"))

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is required for stochastic steps; set [run] seed or pass --seed")
        return int(self.seed)

    def device_params(self) -> DeviceParams:
        return DeviceParams(
            g_m=self.get("device", "g_m"),
            alpha_1=self.get("device", "alpha_1"),
            alpha_2=self.get("device", "alpha_2"),
            beta_1=self.get("device", "beta_1"),
            beta_2=self.get("device", "beta_2"),
            r_series=self.get("device", "r_series"),
        )

    def schedule(self, a_set: float | None = None) -> WaveformSchedule:
        amplitude = self.get("schedule", "a_set") if a_set is None else a_set
        return WaveformSchedule(
            t_reset=self.get("schedule", "t_reset"),
            t_read=self.get("schedule", "t_read"),
            t_set=self.get("schedule", "t_set"),
            a_set=amplitude,
            a_reset=amplitude * self.get("schedule", "reset_ratio"),
            a_read=self.get("schedule", "a_read"),
            reads_after_reset=self.get("schedule", "reads_after_reset"),
            reads_after_set=self.get("schedule", "reads_after_set"),
        )

    def alignment(self, n_period: int) -> AlignmentConfig:
        n_discard = self.get("alignment", "n_discard_max") or None
        search = self.get("alignment", "offset_search_range") or None
        return AlignmentConfig(
            n_period=n_period,
            n_discard_max=n_discard,
            offset_search_range=search,
            tol=self.get("alignment", "tol"),
        )

    def energy_model(self) -> EnergyCostModel:
        return EnergyCostModel(a=self.get("energy", "a"), b=self.get("energy", "b"))

    def generation_energy_model(self) -> EnergyCostModel:
        return EnergyCostModel(a=self.get("energy", "gen_a"), b=self.get("energy", "gen_b"))

    def reference_drift(self) -> ReferenceDriftParams:
        return ReferenceDriftParams(
            equilibrium=self.get("drift", "equilibrium"),
            reversion_rate=self.get("drift", "theta"),
            volatility=self.get("drift", "sigma"),
        )

    def delays(self) -> list[float]:
        raw = str(self.get("capacity", "delays"))
        try:
            out = [float(part) for part in raw.split(",") if part.strip()]
        except ValueError as exc:
            raise ConfigError(f"[capacity] delays: {exc}") from exc
        if not out:
            raise ConfigError("[capacity] delays must name at least one delay")
        return out

    def s_grid(self) -> np.ndarray:
        from .capacity import default_s_grid

        return default_s_grid(
            count=self.get("capacity", "s_count"),
            lo=self.get("capacity", "s_lo"),
            hi=self.get("capacity", "s_hi"),
            spacing=self.get("capacity", "s_spacing"),
        )

    def config_hash(self) -> str:
        lines = [
            f"{section}.{key}={self.values[(section, key)]!r}"
            for section, keys in sorted(_SCHEMA.items())
            for key in sorted(keys)
            if (section, key) not in _HASH_EXCLUDED
        ]
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()

    def dump(self) -> str:
        out = []
        for section in sorted(_SCHEMA):
            out.append(f"[{section}]")
            for key in sorted(_SCHEMA[section]):
                out.append(f"{key} = {self.values[(section, key)]}")
            out.append("")
        return "\n".join(out)


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Resolve defaults, an optional INI file, and explicit overrides.

    With path=None the MEMCAP_CONFIG environment variable is consulted;
    unknown sections or keys are errors so typos cannot silently change runs.
    Override keys are (section, key) tuples with already-typed values.
    """
    values = {
        (section, key): default for section, keys in _SCHEMA.items() for key, (_, default) in keys.items()
    }
    if path is None:
        env_path = os.environ.get(ENV_CONFIG_PATH, "")
        path = env_path or None
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise ConfigError(f"config file not found: {path}")
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key '{key}' in section [{section}]")
                values[(section, key)] = _parse_value(_SCHEMA[section][key][0], raw, section, key)
    for (section, key), value in (overrides or {}).items():
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown override {section}.{key}")
        if value is not None:
            values[(section, key)] = value
    return PipelineConfig(values=values)
