"""Exception hierarchy.

ValidationError covers bad input (problem files, preconditions); NumericsError
covers runtime numerical failures. The CLI maps them to exit codes 2 and 3.
"""


class KreinspecError(Exception):
    pass


class ValidationError(KreinspecError):
    pass


class ExprSyntaxError(ValidationError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvalDomainError(KreinspecError):
    """Expression evaluation left the real domain (log of nonpositive, 0^-n, ...)."""


class HypothesisError(ValidationError):
    """A structural hypothesis on the coefficients failed."""


class NumericsError(KreinspecError):
    pass


class DenseSizeError(NumericsError):
    """Dense nonsymmetric solve requested above the size cap."""


class FactorizationBreakdown(NumericsError):
    pass


class PairingError(NumericsError):
    """A nonreal eigenvalue could not be matched to a conjugate partner."""
