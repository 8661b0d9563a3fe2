"""Exception hierarchy shared by all kobalt modules."""


class KobaltError(Exception):
    """Base class for every error raised by kobalt."""


class InvalidInputError(KobaltError, ValueError):
    """Input violates a documented precondition (shape, finiteness, det, ...)."""


class BoundaryProximityError(KobaltError, ValueError):
    """A point sits outside the numerically safe interior of a ball/disk."""


class NumericalDegeneracyError(KobaltError, ArithmeticError):
    """A factorization or eigensolve could not be carried out reliably."""


class ConvergenceError(KobaltError, ArithmeticError):
    """An iterative or extrapolated limit did not settle within budget."""


class NoIntersectionError(KobaltError, ValueError):
    """A root bracket could not be established for a level-set crossing."""


class InsufficientDataError(KobaltError, ValueError):
    """Too few samples for the requested estimate."""


class DegenerateInputError(KobaltError, ValueError):
    """The input lies on a singular locus where the answer is not unique."""


class BudgetExceededError(KobaltError, RuntimeError):
    """An enumeration hit its work budget.

    ``partial`` carries whatever was collected before the cutoff; it is
    flagged incomplete.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
