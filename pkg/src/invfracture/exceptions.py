"""Exception hierarchy.

Solver failures derive from :class:`SolverError` (CLI exit code 1), bad
user input from :class:`ConfigError` (exit code 2).
"""


class SolverError(Exception):
    """Base class for numerical and model errors."""


class DomainError(SolverError, ValueError):
    """Argument outside the domain of a constitutive or characteristic function."""


class ModelDefinitionError(SolverError):
    """User-supplied derivatives disagree with finite differences."""


class HypothesisViolationError(SolverError):
    """A structural constant (inflection point, M) could not be bracketed."""


class RootNotFoundError(SolverError):
    """No sign change found for a characteristic-equation root."""

    def __init__(self, message, n=None):
        super().__init__(message)
        self.n = n


class InadmissibleChordError(SolverError):
    """The tilted potential is not positive between the chord endpoints."""


class DegenerateChordError(SolverError):
    """Tangency at a chord endpoint; the quadratures diverge logarithmically."""


class NoBranchPointError(SolverError):
    """The mass condition has no root in the admissible window."""


class NumericalFailureError(SolverError):
    """Line search could not produce descent."""


class ConfigError(ValueError):
    """Malformed configuration file or CLI arguments."""


class NoCriticalPointsError(SolverError, ValueError):
    """The forcing constant lies outside the range with two phase-plane equilibria."""
