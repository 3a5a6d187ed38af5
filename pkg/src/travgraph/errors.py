"""Exception hierarchy shared by every module."""


class TravGraphError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TravGraphError, ValueError):
    """An argument lies outside the admissible range."""


class DegenerateSpec(TravGraphError):
    """A plane family is too small for the requested geometric quantity."""


class EmptySet(TravGraphError):
    """A compact set handed to the cube decomposition is empty."""


class QuadratureFailure(TravGraphError, ArithmeticError):
    """Adaptive quadrature exceeded its panel budget."""


class IntegrationFailure(TravGraphError, ArithmeticError):
    """The ODE integrator stalled."""


class BracketViolation(TravGraphError, ArithmeticError):
    """The cone ODE left the band between its explicit sub- and super-solution."""


class PoorConvergence(TravGraphError, ArithmeticError):
    """Richardson estimates of an asymptotic constant disagree."""


class OutOfRange(TravGraphError, ValueError):
    """Evaluation requested beyond a tabulated radius."""


class Overflow(TravGraphError, OverflowError):
    """Direct exponential evaluation would overflow double precision."""


class NonConvergence(TravGraphError, ArithmeticError):
    """Newton iteration hit its iteration cap."""


class LinearSolveFailure(TravGraphError, ArithmeticError):
    """The sparse linear solve inside a Newton step failed."""


class SandwichViolation(TravGraphError, AssertionError):
    """A discrete field left the band between sub- and super-solution."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ConfigError(TravGraphError, ValueError):
    """A run configuration could not be parsed or validated."""
