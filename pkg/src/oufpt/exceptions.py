"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: input/domain problems
exit with 2, numerical failures with 3, validation failures with 1.
"""


class OufptError(Exception):
    """Base class for all package errors."""


class DomainError(OufptError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole (e.g. D_q(0) for odd positive q)."""


class ConfigError(OufptError, ValueError):
    """A run configuration violates one of its invariants."""


class SolverFailure(OufptError, RuntimeError):
    """A solve produced an unusable result."""


class NegativeDensityError(SolverFailure):
    """Solver output dipped below the negativity tolerance."""

    def __init__(self, message, node_index=None, node_time=None, value=None):
        super().__init__(message)
        self.node_index = node_index
        self.node_time = node_time
        self.value = value


class IllConditionedError(SolverFailure):
    """A first-kind diagonal weight collapsed; the (q, x) regime is too ill-posed."""


class QuadratureError(OufptError, RuntimeError):
    """A quadrature did not converge to the requested tolerance."""
