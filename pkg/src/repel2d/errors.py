"""Exception types shared across the package."""


class Repel2dError(Exception):
    """Base class for every error this package raises on purpose."""


class ShapeError(Repel2dError, ValueError):
    """Operands have incompatible or malformed dimensions."""


class ParameterError(Repel2dError, ValueError):
    """A parameter lies outside its documented range."""


class ContractError(Repel2dError, ValueError):
    """An input violates a documented precondition (e.g. asymmetric weights)."""


class DataError(Repel2dError, ValueError):
    """A dataset file or directory cannot be decoded as documented."""


class DefinitenessError(Repel2dError, ArithmeticError):
    """A matrix that must be positive definite is not.

    Carries ``smallest_eigenvalue`` so callers can decide whether a ridge
    shift is a sensible repair.
    """

    def __init__(self, message: str, smallest_eigenvalue: float):
        super().__init__(message)
        self.smallest_eigenvalue = float(smallest_eigenvalue)


class RankError(Repel2dError, ArithmeticError):
    """A matrix is so rank-deficient that the problem is degenerate."""


class NumericalQualityError(Repel2dError, ArithmeticError):
    """A computed decomposition failed its residual or orthogonality bound."""
