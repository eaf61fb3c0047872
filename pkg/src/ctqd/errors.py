"""Exception types shared across the package."""


class CtqdError(Exception):
    """Base class for all package-specific errors."""


class InvalidMatrixError(CtqdError, ValueError):
    """Matrix input contains NaN/Inf or has an unsupported shape."""


class DimensionError(CtqdError, ValueError):
    """Operands have incompatible dimensions."""


class NormalizationError(CtqdError, ValueError):
    """State vector norm deviates from 1 beyond tolerance."""


class DomainError(CtqdError, ValueError):
    """Argument outside the domain of a pulse shape or design formula."""


class DegenerateError(CtqdError, ValueError):
    """Hamiltonian is fully degenerate; no eigenframe branch can be selected."""


class NotBlockDiagonalError(CtqdError, ValueError):
    """Propagator does not leave the dark state invariant.

    Raised when the dark row/column of a {d, b, e} propagator is not
    (1, 0, 0) to tolerance, which signals broken Stokes/pump
    synchronization.
    """


class ConstraintError(CtqdError, ValueError):
    """Phase vector violates the gauge constraint of a long-range model."""


class UseNumericError(CtqdError, ValueError):
    """No analytic phase family covers this target; use the numeric solver."""


class NoSolutionError(CtqdError, RuntimeError):
    """Numeric phase solver failed to converge; carries the best attempt."""

    def __init__(self, message, best_phases=None, best_objective=None):
        super().__init__(message)
        self.best_phases = best_phases
        self.best_objective = best_objective


class SpecError(CtqdError, ValueError):
    """Inconsistent hierarchy specification or malformed config."""


class StepCountError(CtqdError, RuntimeError):
    """Propagation convergence guard failed at the configured step count."""


class PrecisionWarning(UserWarning):
    """Requested derivative order is beyond reliable finite-difference reach."""
