"""Exception types raised across the package."""


class UrllcEvtError(Exception):
    """Base class for all package errors."""


class NonPositiveValue(UrllcEvtError, ValueError):
    pass


class DomainError(UrllcEvtError, ValueError):
    pass


class InsufficientData(UrllcEvtError, ValueError):
    pass


class InsufficientTail(UrllcEvtError, ValueError):
    """Too few threshold exceedances to fit a tail model."""


class DegenerateSample(UrllcEvtError, ValueError):
    """Sample has no spread (all values identical)."""


class DegeneratePartition(DegenerateSample):
    """Too few distinct values to fill every state."""


class QuantileBelowThreshold(UrllcEvtError, ValueError):
    """Requested tail probability is larger than the exceedance probability.

    The caller should answer the query from the bulk model instead.
    """


class InfeasibleChannel(UrllcEvtError, ValueError):
    pass
