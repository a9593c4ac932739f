"""Exception types shared across the toolkit."""


class KeyscoreError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(KeyscoreError):
    """Input data violates a documented contract (bad schema, bad value)."""


class MissingEmbeddingError(ValidationError):
    """An embedding was required for a phrase but the provider has none."""


class UndefinedResultError(KeyscoreError):
    """A statistic is undefined for the given inputs (e.g. constant series)."""
