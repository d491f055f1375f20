"""Exception types shared across the package."""


class ZonoError(Exception):
    """Base class for all package errors."""


class RegistryMismatchError(ZonoError):
    """Operands reference different symbol registries."""


class ShapeMismatchError(ZonoError):
    """Vector/matrix dimensions are not conformable."""


class DegreeError(ZonoError):
    """Operation requires an affine (degree <= 1) form."""


class IllConditionedError(ZonoError):
    """Transformation matrix is singular or too ill-conditioned to invert soundly."""


class SplitBudgetError(ZonoError):
    """A split would produce more parts than the configured budget."""


class LambdaTooSmall(ZonoError):
    """Regularization below the feasibility threshold; splitting is required.

    Carries the threshold so callers can decide how to split.
    """

    def __init__(self, beta: float):
        super().__init__(f"regularization below feasibility threshold beta={beta!r}")
        self.beta = beta


class DataError(ZonoError):
    """Malformed or unusable input data."""


class EmptyDataError(DataError):
    """Input contains no usable rows."""


class BudgetExceededError(ZonoError):
    """World enumeration would exceed the configured budget."""
