"""Energy-constrained information storage on SDC memristors.

Device VI/state modelling, trace preprocessing, programming-energy fitting,
delay-conditioned drift channels, and capacity-cost curves via
cost-constrained Blahut-Arimoto.
"""

from .capacity import (
    CapacityCurvePoint,
    ChannelSpec,
    DelayCurve,
    blahut_arimoto,
    capacity_cost_curve,
    default_s_grid,
    delay_sweep,
    mutual_information,
)
from .device import (
    DeviceParams,
    EstimationWeights,
    StateEstimate,
    diode_current,
    estimate_state,
    estimation_weights,
    low_voltage_resistance,
    memristor_current,
)
from .drift import (
    DriftChannelMatrix,
    DriftSample,
    QuantisationGrid,
    ReferenceDriftParams,
    RetentionSeries,
    empirical_sampler,
    estimate_channel,
    ingest_drift_samples,
    make_grid,
    quantise_value,
    reference_drift_sample,
    reference_drift_series,
    reference_sampler,
)
from .energyfit import (
    EnergyCostModel,
    EnergyObservation,
    FitDiagnostics,
    SegmentedCycle,
    energy_cost,
    fit_energy_model,
    observations_from_cycles,
)
from .errors import (
    ChannelEstimationError,
    ConfigError,
    DegenerateTraceError,
    FitConvergenceError,
    IngestError,
    InvalidArgumentError,
    MemcapError,
    OffsetConvergenceError,
    UnderdeterminedFitError,
)
from .signals import (
    AlignmentConfig,
    MeasurementRecord,
    OffsetCorrection,
    VITrace,
    WaveformSchedule,
    align_time,
    correct_offset,
    pulse_energy,
    segment_cycle,
    synthesize_cycle,
    synthesize_waveform,
    to_vi_trace,
)

__version__ = "0.1.0"
