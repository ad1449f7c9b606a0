"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: argument/domain problems exit 2,
numerical/spectral/invariant problems exit 3.
"""


class ArgumentError(ValueError):
    """An argument violates a documented precondition."""


class DomainError(ValueError):
    """A point or region lies outside the domain an operation requires."""


class NumericalError(RuntimeError):
    """An iterative or adaptive numerical procedure failed to converge."""


class SpectralError(NumericalError):
    """The requested eigenvalue is not below the first eigenvalue of the
    discretized domain, so the linear problem is not definite."""


class InvariantViolationError(RuntimeError):
    """A mathematical property the solution is supposed to satisfy was
    violated beyond tolerance; surfaced instead of silently accepted."""


class ResourceError(RuntimeError):
    """A resource bound (node count, memory) was exceeded."""
