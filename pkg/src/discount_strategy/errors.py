"""Exception and warning types shared across the package."""


class OutOfDomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NonFiniteError(ArithmeticError):
    """An integrand or curve returned NaN or infinity at an evaluation point."""


class NoBracketError(ValueError):
    """Root finding was asked to search an interval without a sign change."""


class SeriesDivergenceError(ArithmeticError):
    """A series evaluation failed to converge within its iteration cap."""


class MissingGuessError(ValueError):
    """A guess-dependent strategy was played without a second-period guess."""


class ConfigError(Exception):
    """Base class for configuration problems."""


class ConfigParseError(ConfigError):
    """The configuration file could not be parsed."""


class ConfigValidationError(ConfigError):
    """The configuration parsed but violates a model invariant."""


class DepthExceededWarning(UserWarning):
    """Adaptive quadrature hit its recursion cap before meeting tolerance.

    The best available estimate is still returned; the warning is the
    error flag required by the integration contract.
    """
