"""Exception hierarchy shared by every pipeline stage."""


class ProfilecastError(Exception):
    """Base class for all errors raised by profilecast."""


# input / IO (CLI exit code 2)
class IngestError(ProfilecastError):
    pass


class SchemaError(IngestError):
    pass


class CSVParseError(IngestError):
    pass


class DuplicateRecordError(IngestError):
    pass


class RecordValidationError(IngestError):
    pass


class InputMismatchError(ProfilecastError):
    pass


# configuration (CLI exit code 3)
class ConfigError(ProfilecastError):
    pass


class ParameterError(ConfigError, ValueError):
    pass


# numeric / degenerate metric failures (CLI exit code 4)
class NumericError(ProfilecastError):
    pass


class ShapeError(NumericError, ValueError):
    pass


class InsufficientDataError(NumericError):
    pass


class EmptyInputError(NumericError):
    pass


class ConvergenceError(NumericError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UndefinedMetricError(NumericError):
    pass


class CoincidentCentroidsError(UndefinedMetricError, ZeroDivisionError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class InfiniteIndexError(UndefinedMetricError):
    pass


class PipelineError(ProfilecastError):
    """Wraps a stage failure with the name of the phase that raised it."""

    def __init__(self, phase, cause):
        super().__init__(f"[{phase}] {type(cause).__name__}: {cause}")
        self.phase = phase
        self.cause = cause
