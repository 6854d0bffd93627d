"""Exception hierarchy shared by all modules."""


class TpfglError(Exception):
    """Base class for library errors."""


class ParameterMismatchError(TpfglError, ValueError):
    """Operands live over different rings or truncation orders."""


class ValidationError(TpfglError, ValueError):
    """Input data fails a structural invariant (non-prime p, non-Eisenstein θ, ...)."""


class PrecisionError(TpfglError, ArithmeticError):
    """An operation would silently lose p-adic or z-adic precision."""


class ZOverflowError(PrecisionError):
    """z ↦ z^p would push a nonzero term past the z-truncation order."""


class PrecisionExhaustedError(PrecisionError):
    """p-adic budget N + v_min dropped below 1."""


class UnsupportedPrecisionError(PrecisionError):
    """Requested Witt precision is outside what the coordinate oracle supports."""


class NonUnitError(TpfglError, ArithmeticError):
    """An element that must be invertible is not."""


class ConstantTermError(TpfglError, ValueError):
    """Substitution requires a series without constant term."""


class IntegralityError(TpfglError, ArithmeticError):
    """A formal group law coefficient came out with negative p-adic valuation."""


class WrongCharacteristicError(TpfglError, ValueError):
    """Height is only defined over rings where p = 0."""


class HeightSanityError(TpfglError, ArithmeticError):
    """A mod-p p-series has a nonzero coefficient where none may occur."""


class CheckFailedError(TpfglError, AssertionError):
    """A verified identity of the theorem bundle did not hold."""
