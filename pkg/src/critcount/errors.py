"""Exception types shared across the package.

Each error carries a short machine-readable ``kind`` so the CLI and the
HTTP service can map failures to exit codes / response bodies uniformly.
"""


class CritcountError(Exception):
    kind = "ERROR"


class SizingError(CritcountError):
    """Mesh spacing h is out of range for the requested geometry."""

    kind = "SIZING"


class DegenerateProfileError(CritcountError):
    """Boundary profile has degenerate critical points (or is constant)."""

    kind = "DEGENERATE_PROFILE"


class DegenerateClassError(CritcountError):
    """Inner boundary value coincides with an extreme value of the profile."""

    kind = "DEGENERATE_CLASS"


class ConvergenceFailureError(CritcountError):
    """Newton iteration failed to reduce the residual below tolerance."""

    kind = "CONVERGENCE_FAILURE"


class EllipticityFailureError(CritcountError):
    """Coefficient matrix is not symmetric positive definite at a sample."""

    kind = "ELLIPTICITY_FAILURE"


class IntegrityError(CritcountError):
    """A structural invariant of a computed object failed (e.g. the
    discrete maximum principle)."""

    kind = "INTEGRITY"


class LoopThroughZeroError(CritcountError):
    """A probe loop sample hit a vanishing gradient."""

    kind = "LOOP_THROUGH_ZERO"


class SplitLevelsError(CritcountError):
    """Critical values expected to coincide differ beyond tolerance."""

    kind = "SPLIT_LEVELS"

    def __init__(self, message, partition=None):
        super().__init__(message)
        self.partition = partition if partition is not None else []
