"""Exception hierarchy for the package."""


class CoexistenceError(Exception):
    """Base class for all errors raised by :mod:`qubit_coexistence`."""


class NotAnEffect(CoexistenceError, ValueError):
    """Operator has eigenvalues outside ``[0, 1]`` beyond tolerance."""

    def __init__(self, lam_min, lam_max, message=None):
        self.lam_min = float(lam_min)
        self.lam_max = float(lam_max)
        if message is None:
            message = (
                f"not an effect: eigenvalues {self.lam_min:.17g} and "
                f"{self.lam_max:.17g} are not both in [0, 1]"
            )
        super().__init__(message)


class NonOrthogonalRotation(CoexistenceError, ValueError):
    pass


class DegenerateSubspace(CoexistenceError, ValueError):
    pass


class DegenerateCross(CoexistenceError, ValueError):
    """The pair commutes (numerically); no M3 frame can be oriented."""


class NotSpacelike(CoexistenceError, ValueError):
    pass


class Commuting(CoexistenceError, ValueError):
    pass


class InvalidBloch(CoexistenceError, ValueError):
    pass


class NotCoexistent(CoexistenceError):
    """Raised when a joint observable is requested for a non-coexistent pair."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PositivityViolation(CoexistenceError, ArithmeticError):
    """A constructed joint observable failed validation beyond tolerance.

    This signals a tolerance bug rather than a mathematical failure.
    """

    def __init__(self, lam_min, message=None):
        self.lam_min = float(lam_min)
        super().__init__(message or f"constructed operator has eigenvalue {lam_min:.3e}")


class BudgetExhaustedWarning(RuntimeWarning):
    """The feasibility search ran out of evaluations before converging."""
