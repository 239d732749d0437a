"""Exception types raised across the package."""


class LambekError(Exception):
    """Base class for all package errors."""


# syntax / terms

class TypeSyntaxError(LambekError, ValueError):
    pass


class TermSyntaxError(LambekError, ValueError):
    pass


class UnknownWord(LambekError, KeyError):
    def __init__(self, word):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f"no type assigned to word {self.word!r}"


class InvalidDerivation(LambekError, ValueError):
    pass


class IllTyped(LambekError, TypeError):
    def __init__(self, message, subterm=None):
        super().__init__(message)
        self.subterm = subterm


class LinearityViolation(IllTyped):
    pass


# tensors

class DimMismatch(LambekError, ValueError):
    pass


class VarianceMismatch(LambekError, ValueError):
    pass


class SlotOutOfRange(LambekError, IndexError):
    pass


class ZeroNorm(LambekError, ValueError):
    pass


class SingularBasisChange(LambekError, ValueError):
    pass


class InvalidMetric(LambekError, ValueError):
    pass


class Degenerate(LambekError, RuntimeError):
    pass


# density spaces

class NoContractibleBoundary(LambekError, ValueError):
    pass


class FactorNotFound(LambekError, LookupError):
    pass


class WeightError(LambekError, ValueError):
    pass


class ShapeMismatch(LambekError, ValueError):
    pass


# interpretation

class UnknownAtom(LambekError, KeyError):
    def __str__(self):
        return f"no semantic space for atom {self.args[0]!r}"


class MissingInterpretation(LambekError, KeyError):
    def __str__(self):
        return f"no value for {self.args[0]!r} in assignment or lexicon"


class FactorMismatch(LambekError, ValueError):
    pass


class NoRouteFound(LambekError, RuntimeError):
    pass
