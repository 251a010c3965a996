"""Exception types shared across the toolkit.

Every error raised on a contract violation derives from ``JcseKitError`` so
callers (and the CLI) can distinguish validation failures from bugs.
"""


class JcseKitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(JcseKitError):
    """A file record could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(JcseKitError):
    """A value violates a documented invariant."""


class EmptyCorpus(JcseKitError):
    """An operation requiring a non-empty corpus received an empty one."""


class EmptyInput(JcseKitError):
    """An operation requiring non-empty input received nothing."""


class ZeroVector(JcseKitError):
    """Cosine similarity is undefined for a zero-norm vector."""


class NoChunks(JcseKitError):
    """A sentence (or corpus) without noun chunks cannot be masked."""


class MissingFill(JcseKitError):
    """A template fill mapping does not cover every sentinel id."""

    def __init__(self, sentinel_id: int):
        super().__init__(f"no fill for sentinel {sentinel_id}")
        self.sentinel_id = sentinel_id


class ExhaustedRedraws(JcseKitError):
    """The generator could not produce an acceptable candidate in the redraw budget."""


class EmptyTriplets(JcseKitError):
    """Training requires at least one triplet."""


class NonFiniteLoss(JcseKitError):
    """Training aborted because a batch produced a non-finite loss."""

    def __init__(self, epoch: int, batch: int, value: float):
        super().__init__(f"non-finite loss {value!r} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch


class NoCandidate(JcseKitError):
    """Every candidate word removal would empty one of the pair's sentences."""


class LengthMismatch(JcseKitError):
    """Two paired sequences have different lengths."""


class DegenerateInput(JcseKitError):
    """Statistic undefined on the given input (e.g. a constant list)."""


class NoRelevant(JcseKitError):
    """A retrieval query has no relevant document in the judgments."""


class DimensionMismatch(JcseKitError):
    """Two encoders that must share an embedding dimension do not."""
