"""Exception hierarchy. Every library error derives from ProblogicError."""


class ProblogicError(Exception):
    pass


class FormulaSyntaxError(ProblogicError):
    """Raised by the parser; ``position`` is 1-based."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class NotPositive(ProblogicError):
    pass


class UnknownProposition(ProblogicError):
    pass


class InvalidModel(ProblogicError):
    pass


class CandidateBudgetExceeded(ProblogicError):
    pass


class GammaUnsatisfiable(ProblogicError):
    pass


class LpInternalError(ProblogicError):
    """A solver result failed exact re-verification, or the pivot guard tripped."""


class NotALattice(ProblogicError):
    pass


class NotAnAlgebra(ProblogicError):
    pass


class InconsistentValuation(ProblogicError):
    pass


class AmbiguousExtension(ProblogicError):
    pass


class NotRepresentable(ProblogicError):
    pass


class UnknownCase(ProblogicError):
    pass
