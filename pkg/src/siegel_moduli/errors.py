"""Exception hierarchy.

Every domain error carries a stable ``kind`` string so the command line
front end can report it without inspecting class names.
"""


class SiegelError(ValueError):
    kind = "domain_error"


class NotSymmetric(SiegelError):
    kind = "not_symmetric"


class NotPositiveDefinite(SiegelError):
    kind = "not_positive_definite"


class OrderMismatch(SiegelError):
    kind = "order_mismatch"


class NotSymplectic(SiegelError):
    kind = "not_symplectic"


class SingularDenominator(SiegelError):
    kind = "singular_denominator"


class GenusMismatch(SiegelError):
    kind = "genus_mismatch"


class ConsistencyError(SiegelError):
    """Internal numerical invariant failed; indicates a bug, not bad input."""

    kind = "internal_consistency"


class IterationLimitExceeded(SiegelError):
    kind = "iteration_limit_exceeded"


class Unsupported(SiegelError):
    kind = "unsupported"


class NotStandardPosition(SiegelError):
    kind = "not_standard_position"


class InvalidCurve(SiegelError):
    kind = "invalid_curve"


class RiemannRelationViolation(SiegelError):
    kind = "riemann_relation_violation"


class QuadratureNonConvergence(SiegelError):
    kind = "quadrature_non_convergence"


class QueryTooCloseToBranchPoint(SiegelError):
    kind = "query_too_close_to_branch_point"


class InvalidFamily(SiegelError):
    kind = "invalid_family"


class Inconclusive(SiegelError):
    """A degeneration probe whose trend matches neither classification."""

    kind = "inconclusive"


class InvalidConfig(SiegelError):
    kind = "invalid_config"
