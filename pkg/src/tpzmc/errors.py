"""Exception hierarchy.

Every error carries a short machine-readable ``category`` so the CLI can
report failures without parsing messages.
"""


class TPZMCError(Exception):
    category = "error"


class ParameterError(TPZMCError, ValueError):
    category = "parameter"


class DegenerateCurveError(ParameterError):
    category = "degenerate-curve"


class ContinuationError(TPZMCError):
    """A path came too close to a branch point to track the sheet safely."""

    category = "continuation"


class QuadratureError(TPZMCError):
    category = "quadrature"

    def __init__(self, message, worst_segment=None, error_estimate=None):
        super().__init__(message)
        self.worst_segment = worst_segment
        self.error_estimate = error_estimate


class PoleError(TPZMCError):
    category = "pole"


class NotACycleError(TPZMCError):
    category = "not-a-cycle"


class LatticeDetectionError(TPZMCError):
    category = "lattice"

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularPointError(TPZMCError):
    category = "singular-point"


class PreconditionError(TPZMCError, ValueError):
    category = "precondition"


class ClassificationError(TPZMCError):
    category = "classification"


class GlueError(TPZMCError):
    category = "glue"

    def __init__(self, message, max_gap=None):
        super().__init__(message)
        self.max_gap = max_gap


class GuardError(TPZMCError):
    category = "guard"
