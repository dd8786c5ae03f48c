"""Exception hierarchy.

Every error raised on bad input derives from :class:`ToricGHError`, which is a
``ValueError`` so generic callers can still catch it the usual way.
"""


class ToricGHError(ValueError):
    """Base class for all library errors."""

    code = "error"


class Unbounded(ToricGHError):
    code = "unbounded"


class Empty(ToricGHError):
    code = "empty"


class Degenerate(ToricGHError):
    code = "degenerate"


class DimensionMismatch(ToricGHError):
    code = "dimension_mismatch"


class BadK(ToricGHError):
    code = "bad_k"


class BadBound(ToricGHError):
    code = "bad_bound"


class AssumptionViolated(ToricGHError):
    code = "assumption_violated"


class SolverDiverged(ToricGHError):
    code = "solver_diverged"


class BoundaryOrExterior(ToricGHError):
    code = "boundary_or_exterior"


class BadConfig(ToricGHError):
    code = "bad_config"


class TooLarge(ToricGHError):
    code = "too_large"


class NotDelzant(ToricGHError):
    code = "not_delzant"


class NormalFanMismatch(ToricGHError):
    code = "normal_fan_mismatch"


class UnknownTestFunction(ToricGHError):
    code = "unknown_test_function"
