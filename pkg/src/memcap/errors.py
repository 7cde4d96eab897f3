"""Exception types shared across the package."""


class MemcapError(Exception):
    """Base class for all package-specific failures."""


class InvalidArgumentError(MemcapError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateTraceError(MemcapError):
    """A trace has no usable measurement pairs left after filtering."""


class OffsetConvergenceError(MemcapError):
    """Offset search could not reduce the quadrant objective.

    Carries the best offsets found so callers can inspect or reuse them.
    """

    def __init__(self, message: str, dv: float, di: float, objective: float):
        super().__init__(message)
        self.dv = dv
        self.di = di
        self.objective = objective


class UnderdeterminedFitError(MemcapError):
    """Too few distinct observations to identify the model parameters."""


class FitConvergenceError(MemcapError):
    """Least-squares iteration exhausted its budget without converging."""

    def __init__(self, message: str, model=None, rss: float = float("nan")):
        super().__init__(message)
        self.model = model
        self.rss = rss


class IngestError(MemcapError):
    """A data file is missing, unreadable, or violates its schema."""


class ChannelEstimationError(MemcapError):
    """A drift sampler failed while estimating a channel row."""

    def __init__(self, message: str, input_index: int):
        super().__init__(message)
        self.input_index = input_index


class ConfigError(MemcapError):
    """A configuration file or flag set is invalid."""
