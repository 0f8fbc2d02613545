"""Exception types shared across the package."""


class QmcisError(Exception):
    """Base class for package-specific errors."""


class BudgetExceededError(QmcisError):
    """Exact discrepancy enumeration would exceed the corner-evaluation budget.

    Use the lower-bound estimator instead.
    """


class ZeroDensityError(QmcisError):
    """Every point of the set has zero density; the self-normalized
    estimator (and its weight vector) is undefined."""


class OracleError(QmcisError):
    """A box-measure oracle returned values outside its contract
    (out of [0, 1 + eps] or non-monotone on sampled pairs)."""
