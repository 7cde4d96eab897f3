"""Delay-conditioned cGAN for memristive resistive drift.

Trains a generator on retention time series with two discriminators (one for
sequence realism, one enforcing consistency across timescales) and exports
drift samples in the interchange CSV consumed by the channel estimator.
"""

from .config import ConfigError, GanConfig, load_config
from .data import (
    RetentionSeries,
    data_hash,
    load_bundled_series,
    load_series_dir,
    make_standin_series,
    read_series_csv,
    write_series_csv,
)
from .evaluate import ConsistencyReport, evaluate_delay_consistency, ks_statistic, long_delay_mean
from .export import export_samples
from .model import TrainedDriftModel, sample_jump
from .train import TrainingDiverged, train

__version__ = "0.1.0"
