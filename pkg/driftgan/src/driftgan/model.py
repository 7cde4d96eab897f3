"""Generator and discriminators for delay-conditioned resistive drift.

The generator is a learned mean-reverting transition in normalized
log-resistance space: conditioning networks produce a state-dependent
reversion rate, attractor, and volatility, and the delay enters through the
exact relaxation kernel exp(-theta * delay).  That skeleton makes one long
jump agree with the composition of shorter jumps up to the state dependence
of the heads, and the delay discriminator trains away the remainder, which is
what lets the model extrapolate past the span of the training series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .config import GanConfig


class Generator(nn.Module):
    """Learned relaxation jump in normalized log-resistance space.

    The reversion rate and volatility are global learned scalars while the
    attractor is a state-conditioned network; with that split, chaining two
    half-delay jumps reproduces the one-jump variance exactly, so timescale
    consistency only depends on the attractor's smoothness (which the delay
    discriminator polices).
    """

    def __init__(self, config: GanConfig):
        super().__init__()
        self.noise_dim = config.noise_dim
        hidden = config.hidden
        self.mu_net = nn.Sequential(nn.Linear(1, hidden), nn.Tanh(), nn.Linear(hidden, hidden), nn.Tanh(), nn.Linear(hidden, 1))
        # raw values pass through softplus; start near 0.05/unit and a unit
        # volatility rather than at arbitrary init scale
        self.theta_raw = nn.Parameter(torch.tensor(-3.0))
        self.sigma_raw = nn.Parameter(torch.tensor(-0.5))
        self.noise_proj = nn.Linear(config.noise_dim, 1, bias=False)

    def forward(self, x: torch.Tensor, delay: torch.Tensor, z: torch.Tensor) -> torch.Tensor:
        """One conditional jump: normalized log-state after ``delay`` units."""
        theta = nn.functional.softplus(self.theta_raw) + 1e-4
        sigma = nn.functional.softplus(self.sigma_raw) + 1e-4
        mu = self.mu_net(x.unsqueeze(-1)).squeeze(-1)
        decay = torch.exp(-theta * delay)
        spread = sigma * torch.sqrt((1.0 - decay * decay) / (2.0 * theta))
        return decay * x + (1.0 - decay) * mu + spread * self.noise_proj(z).squeeze(-1)

    def rollout(self, x0: torch.Tensor, delay: torch.Tensor, steps: int, z: torch.Tensor) -> torch.Tensor:
        """Recursive sequence of ``steps`` jumps; returns (batch, steps)."""
        out = []
        x = x0
        for k in range(steps):
            x = self.forward(x, delay, z[:, k, :])
            out.append(x)
        return torch.stack(out, dim=1)


class SequenceDiscriminator(nn.Module):
    """Scores (start state, per-step delay, sequence increments) as real or generated."""

    def __init__(self, config: GanConfig):
        super().__init__()
        hidden = config.hidden * 2
        self.net = nn.Sequential(
            nn.Linear(config.sequence_length + 2, hidden),
            nn.LeakyReLU(0.2),
            nn.Linear(hidden, hidden),
            nn.LeakyReLU(0.2),
            nn.Linear(hidden, 1),
        )

    def forward(self, x0: torch.Tensor, delay: torch.Tensor, seq: torch.Tensor) -> torch.Tensor:
        increments = torch.diff(torch.cat([x0.unsqueeze(1), seq], dim=1), dim=1)
        packed = torch.cat([x0.unsqueeze(1), delay.unsqueeze(1), increments], dim=1)
        return self.net(packed).squeeze(-1)


class DelayDiscriminator(nn.Module):
    """Scores a single jump (start, end, total delay) as direct or composed.

    The generator is trained to make its one-jump outputs indistinguishable
    from two chained half-delay jumps, enforcing timescale consistency.
    """

    def __init__(self, config: GanConfig):
        super().__init__()
        hidden = config.hidden * 2
        self.net = nn.Sequential(
            nn.Linear(3, hidden),
            nn.LeakyReLU(0.2),
            nn.Linear(hidden, hidden),
            nn.LeakyReLU(0.2),
            nn.Linear(hidden, 1),
        )

    def forward(self, x0: torch.Tensor, x_end: torch.Tensor, delay: torch.Tensor) -> torch.Tensor:
        packed = torch.stack([x0, x_end, delay], dim=1)
        return self.net(packed).squeeze(-1)


@dataclass(frozen=True)
class TrainedDriftModel:
    """Generator weights plus the normalization frame and training metadata."""

    generator_state: dict
    ln_mean: float
    ln_scale: float
    config: dict
    data_hash: str
    final_losses: dict

    def build_generator(self) -> tuple[Generator, GanConfig]:
        config = GanConfig(**self.config)
        gen = Generator(config)
        gen.load_state_dict(self.generator_state)
        gen.eval()
        return gen, config

    def normalize(self, r: np.ndarray) -> np.ndarray:
        return (np.log(r) - self.ln_mean) / self.ln_scale

    def denormalize(self, x: np.ndarray) -> np.ndarray:
        return np.exp(x * self.ln_scale + self.ln_mean)

    def save(self, path) -> None:
        torch.save(
            {
                "generator_state": self.generator_state,
                "ln_mean": self.ln_mean,
                "ln_scale": self.ln_scale,
                "config": self.config,
                "data_hash": self.data_hash,
                "final_losses": self.final_losses,
            },
            path,
        )

    @classmethod
    def load(cls, path) -> "TrainedDriftModel":
        payload = torch.load(path, map_location="cpu", weights_only=False)
        return cls(**payload)


def sample_jump(
    model: TrainedDriftModel,
    r0: np.ndarray,
    delay_units: float,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """n drift outcomes per initial state after delay_units, clamped to range.

    Delays beyond the trained conditioning range are split into chained jumps
    of at most max_delay_disc_delay units each.
    """
    gen, config = model.build_generator()
    r0 = np.atleast_1d(np.asarray(r0, dtype=float))
    x = np.repeat(model.normalize(r0), n)
    remaining = float(delay_units)
    with torch.no_grad():
        while remaining > 0.0:
            step = min(remaining, config.max_delay_disc_delay)
            remaining -= step
            z = torch.from_numpy(rng.standard_normal((len(x), config.noise_dim))).float()
            xt = torch.from_numpy(x).float()
            dt = torch.full((len(x),), float(step))
            x = gen(xt, dt, z).numpy().astype(float)
    out = model.denormalize(x)
    return np.clip(out, config.clamp_lo, config.clamp_hi).reshape(len(r0), n)
