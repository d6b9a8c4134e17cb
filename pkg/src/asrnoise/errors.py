class AsrNoiseError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(AsrNoiseError, ValueError):
    """Malformed or misaligned corpus input."""


class DictionaryError(AsrNoiseError, ValueError):
    """Malformed Pinyin dictionary row."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ConfigError(AsrNoiseError, ValueError):
    """A configuration that cannot produce a valid result (e.g. empty sampling support)."""


class NoiseError(AsrNoiseError, RuntimeError):
    pass


class AlignmentError(AsrNoiseError, ValueError):
    """Structural mismatch between corpora that should be line-aligned."""


class UndefinedRateError(AsrNoiseError, ZeroDivisionError):
    """Error rates requested over zero reference tokens."""
