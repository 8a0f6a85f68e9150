"""
Exceptions raised by the Q-system models
"""


class QSystemError(Exception):
    """Base class for every error raised by app.models"""


class NotDivisible(QSystemError):
    """No Laurent-polynomial quotient exists"""


class NonInvertibleSubstitution(QSystemError):
    """A negative power met a binding that is not a single monomial"""


class DivisionByZero(QSystemError, ZeroDivisionError):
    """A variable with a negative exponent was evaluated at 0"""


class NotMonomial(QSystemError):
    """A weight that must be a Laurent monomial is not one"""


class NonExactWeight(QSystemError):
    """A rearranged continued-fraction weight is not a Laurent polynomial"""


class MotzkinViolation(QSystemError, ValueError):
    """Consecutive entries of a path differ by more than one"""


class CaseMismatch(QSystemError, ValueError):
    """The mutation does not match case (i) or (ii)"""


class NotNilpotent(QSystemError):
    """The t^0 part of a transfer matrix has a cycle"""


class PositivityViolation(QSystemError):
    """A quantity expected to be a positive Laurent polynomial is not"""


class ConservationFailure(QSystemError):
    """A conserved quantity changed along the orbit"""


class DecompositionMismatch(QSystemError):
    """T'_m differs from N_m + B_m"""


class SeedFileError(QSystemError, ValueError):
    """Malformed seed file"""
