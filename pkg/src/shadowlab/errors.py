"""Exception types shared by all modules."""


class InvalidInputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class NumericalFailure(ArithmeticError):
    """Raised when a computed result fails a postcondition check.

    Parameters
    ----------
    invariant : str
        Short name of the invariant that failed.
    detail : str
        Human readable explanation.
    """

    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)


class DegenerateBranchWarning(RuntimeWarning):
    """Emitted when an eigenvalue branch is evaluated at a near crossing."""
