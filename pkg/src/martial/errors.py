"""Exception types shared across the toolkit."""


class MartialError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(MartialError):
    """Invalid configuration value or malformed config document."""


class CorpusError(MartialError):
    """The submission corpus cannot be loaded."""


class TelemetryError(MartialError):
    """A telemetry file violates the record contract."""


class ProviderError(MartialError):
    """The external embedding provider failed or returned bad data."""


class ProviderMismatchError(MartialError):
    """Vectors from different providers (or dimensions) were compared."""


class StaleVocabularyError(MartialError):
    """A directive key is missing from the vocabulary it is encoded against."""
