"""Exception types raised across the package."""


class RefractoError(Exception):
    """Base class for every error raised by refracto."""


class DomainError(RefractoError, ValueError):
    """Input outside the mathematical domain of an operation."""


class NoTotalReflectionError(DomainError):
    """Sample index exceeds the prism index, so no critical angle exists."""


class OutOfRangeError(DomainError):
    """Boundary would fall outside the pixel array."""


class SizeError(RefractoError, ValueError):
    """Sequence too short for the requested window."""


class NoRisingEdgeError(RefractoError):
    """No positive difference inside the scan window."""


class AmbiguousLevelError(RefractoError):
    """First pixels match none of the liquid-level signatures."""


class DegenerateFitError(RefractoError, ValueError):
    pass


class InsufficientCalibrationDataError(RefractoError, ValueError):
    pass


class OutOfCalibratedRangeError(RefractoError, ValueError):
    pass


class CalibrationInputError(RefractoError, ValueError):
    pass


class WeakSignalError(RefractoError):
    """Maximum difference did not clear the detection threshold.

    Usually means the LED is too dim or the integration time too short.
    """


class InsufficientSamplesError(RefractoError, ValueError):
    pass


class UndefinedStatisticError(RefractoError, ValueError):
    """Statistic undefined for the input (zero mean RSD, zero-variance r)."""


class ModelFormatError(RefractoError, ValueError):
    """Calibration model JSON is malformed, has unknown fields or a bad version."""


class ConfigError(RefractoError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class CaptureParseError(RefractoError, ValueError):
    """Base class for capture-file parse failures; carries the line number."""

    def __init__(self, message, line, path=None):
        self.line = line
        self.path = path
        where = f"{path}:{line}" if path is not None else f"line {line}"
        super().__init__(f"{where}: {message}")


class CaptureVersionError(CaptureParseError):
    pass


class MissingKeyError(CaptureParseError):
    pass


class DuplicateKeyError(CaptureParseError):
    pass


class UnknownKeyError(CaptureParseError):
    pass


class CountMismatchError(CaptureParseError):
    pass


class NonNumericSampleError(CaptureParseError):
    pass
