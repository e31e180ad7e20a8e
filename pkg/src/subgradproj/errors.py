"""Exception hierarchy.

Two families: :class:`InvalidInput` covers bad parameters and malformed
arguments (the CLI maps these to exit code 2), :class:`NumericalFailure`
covers failures that only show up while computing (exit code 3).
"""


class SubgradientProjectorError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(SubgradientProjectorError, ValueError):
    pass


class NumericalFailure(SubgradientProjectorError, ArithmeticError):
    pass


class DimensionMismatch(InvalidInput):
    pass


class ZeroNormal(InvalidInput):
    pass


class NonpositiveScalar(InvalidInput):
    pass


class InvalidExponent(InvalidInput):
    pass


class NotUnitary(InvalidInput):
    pass


class EmptyList(InvalidInput):
    pass


class ProxNotSupplied(InvalidInput):
    pass


class UnsupportedSet(InvalidInput):
    pass


class BadWeights(InvalidInput):
    pass


class NotUnit(InvalidInput):
    pass


class NotPSD(InvalidInput):
    pass


class NotSymmetric(InvalidInput):
    pass


class NotNonexpansive(InvalidInput):
    pass


class BadParameter(InvalidInput):
    pass


class BadCSample(InvalidInput):
    pass


class MissingSecondDerivative(InvalidInput):
    pass


class MissingOracle(InvalidInput):
    pass


class InfeasibilityCertificate(NumericalFailure):
    """``f(x) > 0`` while the selected subgradient vanishes.

    Then ``x`` minimizes ``f`` and ``min f > 0``, so the sublevel set
    ``{f <= 0}`` is empty.
    """

    def __init__(self, x, fx, message=None):
        self.x = x
        self.fx = fx
        if message is None:
            message = (f"f(x) = {fx!r} > 0 with zero subgradient at x = "
                       f"{list(map(float, x))}; the target set is empty")
        super().__init__(message)


class NoBracket(NumericalFailure):
    pass


class SingularStencil(NumericalFailure):
    pass


class HypothesisViolated(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass
