"""Exception types raised across the toolkit."""


class SumProdError(Exception):
    """Base class for all toolkit errors."""


class NonUnit(SumProdError, ValueError):
    pass


class BadModulus(SumProdError, ValueError):
    pass


class ModulusMismatch(SumProdError, ValueError):
    pass


class UniverseMismatch(SumProdError, ValueError):
    pass


class ZeroDenominator(SumProdError, ZeroDivisionError):
    pass


class ZeroElement(SumProdError, ValueError):
    pass


class NonPositiveElement(SumProdError, ValueError):
    pass


class ParamOutOfRange(SumProdError, ValueError):
    pass


class EmptyInput(SumProdError, ValueError):
    pass


class ResourceLimit(SumProdError, RuntimeError):
    pass


class DegenerateBisector(SumProdError, ValueError):
    pass


class IsotropicLine(SumProdError, ValueError):
    pass


class NotOnUnitCircle(SumProdError, ValueError):
    pass


class NonUnitRadius(SumProdError, ValueError):
    pass


class NormMismatch(SumProdError, ValueError):
    pass


class PreconditionUnmet(SumProdError, ValueError):
    pass


class AsymmetricConnectionSet(SumProdError, ValueError):
    pass


class NonSquare(SumProdError, ValueError):
    pass


class NonConvergence(SumProdError, RuntimeError):
    pass


class CheckFailure(SumProdError):
    pass


class UsageError(SumProdError, ValueError):
    pass
