"""Exception hierarchy shared by all truncfit modules."""


class TruncFitError(Exception):
    """Base class for every error raised by truncfit."""


# quadrature
class QuadratureError(TruncFitError):
    pass


class NonFiniteInput(QuadratureError, ValueError):
    pass


class ToleranceNotReached(QuadratureError):
    pass


class IntegrandOverflow(QuadratureError):
    """The shifted integrand produced inf/nan despite finite inputs."""


# model
class OutOfSupport(TruncFitError, ValueError):
    pass


class PowerLawLimit(TruncFitError):
    """psi <= 0: mu and sigma do not exist, but beta is still defined."""

    def __init__(self, beta: float, psi: float):
        super().__init__(
            f"psi = {psi!r} <= 0: no finite (mu, sigma); power-law exponent beta = {beta!r}"
        )
        self.beta = beta
        self.psi = psi


class InvalidSigma(TruncFitError, ValueError):
    pass


class OverflowBounds(TruncFitError, OverflowError):
    pass


# estimator
class EmptySample(TruncFitError, ValueError):
    pass


class NonFiniteValue(TruncFitError, ValueError):
    pass


class DegenerateSample(TruncFitError, ValueError):
    pass


class MomentsOutsideSupport(TruncFitError, ValueError):
    pass


class StepOverflow(TruncFitError):
    pass


class EtaExhausted(TruncFitError):
    pass


class DidNotConverge(RuntimeWarning):
    """Warning category; the fit still returns a report with converged=False."""


# cli
class ParseError(TruncFitError, ValueError):
    def __init__(self, path: str, line: int, text: str):
        super().__init__(f"{path}:{line}: cannot parse {text!r} as a number")
        self.line = line


class EmptyDataset(TruncFitError, ValueError):
    pass


class NonPositiveData(TruncFitError, ValueError):
    pass


class BoundsDoNotBracketData(TruncFitError, ValueError):
    pass
