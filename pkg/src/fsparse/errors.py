"""Exception types shared across the package."""


class FSparseError(Exception):
    """Base class for all package errors."""


class SingularMatrix(FSparseError, ValueError):
    pass


class DependentInput(FSparseError, ValueError):
    pass


class TooLarge(FSparseError, ValueError):
    pass


class NotBoolean(FSparseError, ValueError):
    pass


class Unsatisfiable(FSparseError, ValueError):
    pass


class BudgetExhausted(FSparseError, RuntimeError):
    pass


class NotBooleanResult(FSparseError, RuntimeError):
    """Phase-2 rounding produced a spectrum that is not a ±1 function."""


class SubsetNotInSupport(FSparseError, ValueError):
    pass


class ConstantFunction(FSparseError, ValueError):
    pass


class IndexOutOfRange(FSparseError, IndexError):
    pass


class NonConvergence(FSparseError, RuntimeError):
    pass


class DegenerateClass(FSparseError, ValueError):
    pass


class TooConcentrated(FSparseError, ValueError):
    """Some concept carries more posterior mass than the split lemma allows."""


class EmptyPosterior(FSparseError, RuntimeError):
    """No concept in the class is consistent with the observed answers."""
