"""Exception types raised across the package."""


class TextClfError(Exception):
    """Base class for all package errors."""

    kind = "error"


class CorpusError(TextClfError, ValueError):
    kind = "corpus"


class SchemaError(CorpusError):
    kind = "schema"


class FeatureError(TextClfError, ValueError):
    kind = "features"


class TrainingError(TextClfError, ValueError):
    kind = "training"


class DimensionError(TextClfError, ValueError):
    kind = "dimension"


class MetricError(TextClfError, ValueError):
    kind = "metric"


class FormatError(TextClfError, ValueError):
    """A serialized file is malformed or of an unsupported version."""

    kind = "format"


class HashMismatchError(TextClfError):
    """A model file refers to a different vocabulary than the one supplied."""

    kind = "hash_mismatch"


class ConfigError(TextClfError, ValueError):
    kind = "config"


class EmptyDocumentError(FeatureError):
    """Input text has no tokens left after normalization."""

    kind = "empty_document"
