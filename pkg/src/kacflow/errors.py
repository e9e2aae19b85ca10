"""Exception hierarchy shared by every kacflow module."""


class KacflowError(Exception):
    """Base class for all library errors."""


class UnboundVariable(KacflowError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no value bound for variable {self.name!r}"


class NonSquare(KacflowError, ValueError):
    pass


class EmptySampleList(KacflowError, ValueError):
    pass


class DimensionMismatch(KacflowError, ValueError):
    pass


class InexactDivision(KacflowError, ArithmeticError):
    pass


class Inconsistent(KacflowError, ValueError):
    """Raised by ``solve_exact`` when the right-hand side is outside the column space."""


class BadDimension(KacflowError, ValueError):
    pass


class DependentPair(KacflowError, ValueError):
    pass


class IndexOutOfRange(KacflowError, IndexError):
    pass


class ModeMismatch(KacflowError, ValueError):
    pass


class GradingViolation(KacflowError, ValueError):
    def __init__(self, atom, message=""):
        super().__init__(message or f"atom {atom} violates the expected grading")
        self.atom = atom


class CapExceeded(KacflowError, ValueError):
    pass


class AsymmetricInput(KacflowError, ValueError):
    pass


class SingularB(KacflowError, ArithmeticError):
    """B(r) is (numerically) singular: a focal point of the parallel family."""


class HypothesisViolated(KacflowError, ValueError):
    pass


class NoValidJstar(KacflowError, RuntimeError):
    pass


class SingularAtSample(KacflowError, ArithmeticError):
    pass


class DuplicateNode(KacflowError, ValueError):
    pass


class NonzeroFirstRow(KacflowError, ValueError):
    pass


class FocalPoint(KacflowError, ArithmeticError):
    pass


class DomainExceeded(KacflowError, ValueError):
    pass


class BadConfig(KacflowError, ValueError):
    pass
