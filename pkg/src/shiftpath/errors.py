"""Exception types shared across the library."""


class ShiftPathError(Exception):
    """Base class for every library-specific error."""


class NonBinaryEntry(ShiftPathError):
    """Transition matrix contains an entry other than 0 or 1."""


class ZeroColumn(ShiftPathError):
    """A transition-matrix column is all zeros, so some symbol has no preimage."""

    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} of the transition matrix is all zeros")


class InadmissibleWord(ShiftPathError):
    """A word violates the transition matrix."""


class DepthDowngrade(ShiftPathError):
    """Attempt to represent a cylinder function at a shallower depth than it needs."""


class NegativeWeight(ShiftPathError):
    """A weight function that must be nonnegative has a negative value."""


class DepthTooShallow(ShiftPathError):
    """A measure stored at finite depth cannot resolve the requested quantity."""


class NotSubNormalized(ShiftPathError):
    """sup of the transferred constant exceeds 1, so monotone iteration does not apply."""


class NoConvergence(ShiftPathError):
    """An iteration hit its step budget before meeting the tolerance."""

    def __init__(self, max_iter, message=None):
        self.max_iter = max_iter
        super().__init__(message or f"no convergence within {max_iter} iterations")


class MonotonicityViolation(ShiftPathError):
    """The iterates that should decrease pointwise failed to do so."""


class DegenerateH(ShiftPathError):
    """The monotone limit of the transfer iterates vanishes identically."""


class NotFixedPoint(ShiftPathError):
    """A measure claimed to be fixed under the weighted transformer is not."""

    def __init__(self, residual, tol=None):
        self.residual = residual
        self.tol = tol
        msg = f"fixed-point residual {residual:.3e}"
        if tol is not None:
            msg += f" exceeds tolerance {tol:.1e}"
        super().__init__(msg)


class MassCollapse(ShiftPathError):
    """Total mass of the unnormalized iterates fell below the viability floor."""

    def __init__(self, n_used, masses, residual):
        self.n_used = n_used
        self.masses = masses
        self.residual = residual
        super().__init__(
            f"iterate mass collapsed to {masses[-1]:.3e} after {n_used} steps "
            f"(residual of the normalized iterate: {residual:.3e})"
        )


class ZeroMassConditioning(ShiftPathError):
    """A sampled trajectory reached a cylinder of mass zero."""


class FilterMismatch(ShiftPathError):
    """The squared modulus of the filter does not reproduce the weight."""


class ConfigError(ShiftPathError):
    """A configuration document is malformed or inconsistent."""
