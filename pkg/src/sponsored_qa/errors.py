"""Exception hierarchy.

Validation errors mean the inputs were malformed (CLI exit code 2); domain
errors mean well-formed inputs hit a mathematical dead end such as an
infinite cross entropy (exit code 3).
"""


class SponsoredQAError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SponsoredQAError, ValueError):
    """An input violates a documented range or structural invariant."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class EmptyTextError(ValidationError):
    """Text contained no tokens after whitespace splitting."""


class DomainError(SponsoredQAError):
    """Inputs are valid but the requested quantity is undefined."""


class VocabularyMismatchError(DomainError):
    """Two models or documents live over different vocabularies."""


class InfiniteCrossEntropyError(DomainError):
    """A cross entropy diverged because of a zero-probability token."""

    def __init__(self, left: str, right: str):
        self.left = left
        self.right = right
        super().__init__(
            f"cross entropy CE({left}||{right}) is infinite: {left} puts mass on a "
            f"token that {right} gives zero probability; enable smoothing "
            "(smoothing_mu > 0) to avoid zero probabilities"
        )
