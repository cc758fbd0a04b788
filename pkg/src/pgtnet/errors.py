"""
异常定义

All errors raised by pgtnet derive from PgtnetError. Each class carries the
process exit code the CLI maps it to: 1 usage/config, 2 data, 3 numeric
divergence.
"""

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class PgtnetError(Exception):
    """Base exception for pgtnet errors."""
    exit_code = EXIT_DATA


class ConfigError(PgtnetError):
    """Invalid or missing configuration."""
    exit_code = EXIT_USAGE


# ==================== event log parsing ====================

class MissingColumn(PgtnetError):
    """A mapped CSV column is absent from the header."""


class UnparseableTimestamp(PgtnetError):
    """A timestamp cell could not be parsed."""

    def __init__(self, row: int, value: str):
        super().__init__(f"row {row}: cannot parse timestamp {value!r}")
        self.row = row
        self.value = value


class EmptyLog(PgtnetError):
    """The log (or what survives filtering) holds no traces."""


class InvalidEvent(PgtnetError):
    """An event violates the event or trace invariants (empty activity or case id)."""


class MalformedXml(PgtnetError):
    """The XES document is not well-formed XML."""


class MissingMandatoryAttribute(PgtnetError):
    """An XES trace or event lacks a mandatory key."""

    def __init__(self, event_index: int, key: str):
        super().__init__(f"event {event_index}: missing mandatory attribute {key!r}")
        self.event_index = event_index
        self.key = key


# ==================== prefixes and splits ====================

class TraceTooShort(PgtnetError):
    """A trace has too few events to produce a prefix."""


class TooFewCases(PgtnetError):
    """A split would leave a train, validation or test set empty."""


# ==================== graph datasets ====================

class DegenerateStat(PgtnetError):
    """A normalization maximum fitted on the training fold is zero."""


class SchemaVersionMismatch(PgtnetError):
    """A dataset or checkpoint file was written by an incompatible version."""


# ==================== model and training ====================

class ShapeMismatch(PgtnetError):
    """Input arrays do not match the configured model shapes."""
    exit_code = EXIT_USAGE


class NonFiniteOutput(PgtnetError):
    """The forward pass produced NaN or infinity."""
    exit_code = EXIT_NUMERIC


class NonFiniteGradient(PgtnetError):
    """A gradient contains NaN or infinity."""
    exit_code = EXIT_NUMERIC


class Diverged(PgtnetError):
    """Training loss became non-finite; carries the last good model."""
    exit_code = EXIT_NUMERIC

    def __init__(self, message: str, last_good=None):
        super().__init__(message)
        self.last_good = last_good


class PrefixTooShort(PgtnetError):
    """Prediction was requested for a prefix with fewer than two events."""
    exit_code = EXIT_USAGE


class LengthMismatch(PgtnetError):
    """Predictions and records are not aligned."""
