"""Exception hierarchy shared across the package."""


class PrimePointsError(Exception):
    """Base class for all library-specific errors."""


class OutOfRangeError(PrimePointsError):
    """Input outside the supported search range (e.g. odd or oversized m)."""


class ZeroInverseError(PrimePointsError):
    """Modular inverse requested for a residue divisible by the modulus."""


class DimensionMismatchError(PrimePointsError):
    """Operands disagree on dimension (or modulus where one is required)."""


class DegenerateParamsError(PrimePointsError):
    """The two parameter vectors generate the same point set."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SameEpsilonError(PrimePointsError):
    """Operation requires the two bit vectors to differ."""


class NotCertifiedError(PrimePointsError):
    """Requested a certified bound on a set whose hypotheses do not hold."""


class RangeTooLargeError(PrimePointsError):
    """Exhaustive frequency enumeration exceeds the configured budget."""


class DegreeTooLargeError(PrimePointsError):
    """Difference frequencies would alias or leave the certified box."""


class BudgetExceededError(PrimePointsError):
    """Dense oracle computation exceeds its configured budget."""


class IllConditionedError(PrimePointsError):
    """Least-squares subproblem is numerically singular."""


class FrequencyOutOfBoxError(PrimePointsError):
    """Integrand frequency outside the set's certified frequency box."""
