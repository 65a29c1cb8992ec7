"""
Exception hierarchy for the transport capacity toolkit.

Every error raised on purpose by the package derives from CapacityError, so callers
(the CLI in particular) can separate "bad input" from "the maths disagrees with itself".
"""


class CapacityError(Exception):
    """Base class for all toolkit errors"""


class ParameterError(CapacityError, ValueError):
    """
    A parameter invariant is violated.

    The message always names the violated invariant, e.g. "alpha > 2 required, got 2.0"
    """


class DomainError(ParameterError):
    """An operation was called outside the domain it is defined on"""


class DegenerateParametersError(CapacityError):
    """Both k1 and k2 vanish, so the hop-count equation has no interior root"""


class ConsistencyError(CapacityError):
    """Two routes to the same quantity disagree beyond tolerance"""


class VerificationError(CapacityError):
    """One or more verification checks failed"""
