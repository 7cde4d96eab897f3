"""Adversarial training: main sequence discriminator plus delay discriminator."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn

from .config import GanConfig
from .data import RetentionSeries, data_hash
from .model import DelayDiscriminator, Generator, SequenceDiscriminator, TrainedDriftModel


class TrainingDiverged(RuntimeError):
    """Raised when a loss goes non-finite; carries the last finite checkpoint."""

    def __init__(self, message: str, checkpoint: TrainedDriftModel | None):
        super().__init__(message)
        self.checkpoint = checkpoint


def _sequence_batch(
    series_ln: list[np.ndarray],
    config: GanConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Real subsequences: start state, per-step delay, next sequence_length states."""
    steps = config.sequence_length
    x0 = np.empty(config.batch_size)
    delay = np.empty(config.batch_size)
    seq = np.empty((config.batch_size, steps))
    for b in range(config.batch_size):
        ln_r = series_ln[rng.integers(len(series_ln))]
        max_d = min(int(config.max_main_delay), (len(ln_r) - 1) // steps)
        d = int(rng.integers(1, max_d + 1))
        t0 = int(rng.integers(0, len(ln_r) - steps * d))
        x0[b] = ln_r[t0]
        delay[b] = d
        seq[b] = ln_r[t0 + d : t0 + (steps + 1) * d : d]
    return x0, delay, seq


def train(series: list[RetentionSeries], config: GanConfig) -> TrainedDriftModel:
    """Train the delay-conditioned generator on retention series.

    Needs at least two series, each long enough to cut sequence_length-step
    subsequences.  Deterministic for a fixed config (single-threaded CPU,
    seeded batch sampling and noise).
    """
    if len(series) < 2:
        raise ValueError("need at least 2 retention series")
    min_len = config.sequence_length + 1
    if any(len(s) < min_len for s in series):
        raise ValueError(f"every series needs at least {min_len} samples")

    torch.manual_seed(config.seed)
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(1)
    rng = np.random.default_rng(config.seed)

    ln_all = np.concatenate([np.log(s.r) for s in series])
    ln_mean = float(np.mean(ln_all))
    ln_scale = float(np.std(ln_all)) or 1.0
    series_ln = [(np.log(s.r) - ln_mean) / ln_scale for s in series]
    # The delay discriminator conditions on start states spanning slightly
    # beyond the data so timescale consistency holds where the generator is
    # asked to extrapolate, not just in the data bulk.
    x_lo = float(min(ln.min() for ln in series_ln)) - 0.25
    x_hi = float(max(ln.max() for ln in series_ln)) + 0.25

    generator = Generator(config)
    d_main = SequenceDiscriminator(config)
    d_delay = DelayDiscriminator(config)
    opt_g = torch.optim.Adam(generator.parameters(), lr=config.lr, betas=(0.5, 0.999))
    opt_dm = torch.optim.Adam(d_main.parameters(), lr=config.lr, betas=(0.5, 0.999))
    opt_dd = torch.optim.Adam(d_delay.parameters(), lr=config.lr, betas=(0.5, 0.999))
    bce = nn.BCEWithLogitsLoss()

    def snapshot(losses: dict) -> TrainedDriftModel:
        return TrainedDriftModel(
            generator_state={k: v.detach().clone() for k, v in generator.state_dict().items()},
            ln_mean=ln_mean,
            ln_scale=ln_scale,
            config=config.as_dict(),
            data_hash=data_hash(series),
            final_losses=losses,
        )

    steps = config.sequence_length
    delay_norm = config.max_delay_disc_delay
    last_losses: dict = {}
    checkpoint: TrainedDriftModel | None = None
    for epoch in range(config.epochs):
        x0_np, d_np, seq_np = _sequence_batch(series_ln, config, rng)
        x0 = torch.from_numpy(x0_np).float()
        d_units = torch.from_numpy(d_np).float()
        real_seq = torch.from_numpy(seq_np).float()
        d_feat = d_units / config.max_main_delay

        z = torch.from_numpy(rng.standard_normal((config.batch_size, steps, config.noise_dim))).float()
        fake_seq = generator.rollout(x0, d_units, steps, z)

        # main discriminator: real sequences vs generated, 0.9 label smoothing
        opt_dm.zero_grad()
        loss_dm = bce(d_main(x0, d_feat, real_seq), torch.full((config.batch_size,), 0.9)) + bce(
            d_main(x0, d_feat, fake_seq.detach()), torch.zeros(config.batch_size)
        )
        loss_dm.backward()
        opt_dm.step()

        # delay discriminator: one long jump vs two chained half jumps
        tau = torch.from_numpy(
            np.exp(rng.uniform(np.log(1.0), np.log(config.max_delay_disc_delay), config.batch_size))
        ).float()
        x0_delay = torch.from_numpy(rng.uniform(x_lo, x_hi, config.batch_size)).float()
        z1 = torch.from_numpy(rng.standard_normal((config.batch_size, config.noise_dim))).float()
        z2 = torch.from_numpy(rng.standard_normal((config.batch_size, config.noise_dim))).float()
        z3 = torch.from_numpy(rng.standard_normal((config.batch_size, config.noise_dim))).float()
        direct = generator(x0_delay, tau, z1)
        composed = generator(generator(x0_delay, tau / 2.0, z2), tau / 2.0, z3)
        tau_feat = tau / delay_norm

        opt_dd.zero_grad()
        loss_dd = bce(
            d_delay(x0_delay, composed.detach(), tau_feat), torch.full((config.batch_size,), 0.9)
        ) + bce(d_delay(x0_delay, direct.detach(), tau_feat), torch.zeros(config.batch_size))
        loss_dd.backward()
        opt_dd.step()

        # generator: fool both discriminators, two summed BCE terms
        opt_g.zero_grad()
        loss_g = bce(d_main(x0, d_feat, fake_seq), torch.ones(config.batch_size)) + bce(
            d_delay(x0_delay, direct, tau_feat), torch.ones(config.batch_size)
        )
        loss_g.backward()
        opt_g.step()

        last_losses = {
            "generator": float(loss_g.item()),
            "main_discriminator": float(loss_dm.item()),
            "delay_discriminator": float(loss_dd.item()),
            "epochs_completed": epoch + 1,
        }
        if not all(np.isfinite(v) for v in last_losses.values()):
            raise TrainingDiverged(f"non-finite loss at epoch {epoch + 1}: {last_losses}", checkpoint)
        checkpoint = snapshot(last_losses)

    return checkpoint if checkpoint is not None else snapshot(last_losses)
