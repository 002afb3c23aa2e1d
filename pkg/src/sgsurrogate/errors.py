"""Exception types shared across the package."""


class SparseGridError(Exception):
    """Base class for all structured errors raised by this package."""


class InvalidNodeError(SparseGridError):
    """A (level, index) pair that does not exist in the node hierarchy."""


class DimensionMismatchError(SparseGridError):
    """Query vector dimension differs from the model dimension."""


class EmptyModelError(SparseGridError):
    """Operation requires a model with at least one node."""


class ContractViolationError(SparseGridError):
    """A precondition on model state was violated (e.g. surplus ordering)."""


class EvaluationError(SparseGridError):
    """Full model evaluation failed; carries the offending coordinate."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class PersistenceError(SparseGridError):
    """Surrogate file could not be parsed or written."""
