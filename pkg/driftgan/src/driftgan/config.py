"""Training and export configuration, from an INI file plus flag overrides."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GanConfig:
    """Hyperparameters for the delay-conditioned generator and discriminators.

    Delays are in abstract time units; unit_minutes maps one unit onto the
    retention sampling interval (default one minute).  Sequences of
    sequence_length generated steps feed the main discriminator at per-step
    delays up to max_main_delay; the delay discriminator sees single jumps up
    to max_delay_disc_delay.
    """

    sequence_length: int = 4
    max_main_delay: float = 10.0
    max_delay_disc_delay: float = 200.0
    unit_minutes: float = 1.0
    noise_dim: int = 8
    hidden: int = 32
    lr: float = 1e-3
    epochs: int = 600
    batch_size: int = 128
    seed: int = 0
    clamp_lo: float = 1e4
    clamp_hi: float = 1e9

    def __post_init__(self):
        if self.sequence_length < 2:
            raise ConfigError("sequence_length must be at least 2")
        if self.max_delay_disc_delay < self.max_main_delay:
            raise ConfigError("max_delay_disc_delay must be >= max_main_delay")
        for name in ("max_main_delay", "unit_minutes", "lr", "clamp_lo", "clamp_hi"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be positive")
        if self.noise_dim < 1 or self.hidden < 1 or self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("noise_dim, hidden, epochs, batch_size must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


_FIELD_TYPES = {
    "sequence_length": int,
    "max_main_delay": float,
    "max_delay_disc_delay": float,
    "unit_minutes": float,
    "noise_dim": int,
    "hidden": int,
    "lr": float,
    "epochs": int,
    "batch_size": int,
    "seed": int,
    "clamp_lo": float,
    "clamp_hi": float,
}


def load_config(path: str | None = None, overrides: dict | None = None) -> GanConfig:
    values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser()
        if not parser.read(path, encoding="utf-8"):
            raise ConfigError(f"config file not found: {path}")
        if parser.sections() != ["gan"]:
            raise ConfigError("expected a single [gan] section")
        for key, raw in parser.items("gan"):
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown key '{key}' in [gan]")
            try:
                values[key] = _FIELD_TYPES[key](raw)
            except ValueError as exc:
                raise ConfigError(f"[gan] {key}: {exc}") from exc
    for key, value in (overrides or {}).items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown override '{key}'")
        if value is not None:
            values[key] = value
    return GanConfig(**values)
