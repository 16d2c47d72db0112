"""Exception hierarchy shared by every module of the package."""


class SurfaceError(ValueError):
    """Base class for all errors raised by :mod:`timelike`."""


class DomainError(SurfaceError):
    """Input lies outside the domain of an operation."""


class DegeneratePairError(SurfaceError):
    """The two stereographic coordinates coincide (x = y)."""


class DegenerateBasisError(SurfaceError):
    """Four vectors fail to span R^4_1."""


class DegeneratePlaneError(SurfaceError):
    """Two lightlike rays are proportional and do not span a plane."""


class IllPosedError(SurfaceError):
    """Too many nodes are degenerate for a pointwise quotient to be meaningful."""


class InconsistentGeneratorsError(SurfaceError):
    """Generating data (x, y, mu) violates the spherical normalization."""


class MarginError(SurfaceError):
    """A grid touches the singular set of a surface family.

    ``nodes`` holds the offending ``(i, j)`` grid indices.
    """

    def __init__(self, message, nodes=()):
        self.nodes = [tuple(int(k) for k in n) for n in nodes]
        if self.nodes:
            shown = ", ".join(str(n) for n in self.nodes[:10])
            more = "" if len(self.nodes) <= 10 else f" (+{len(self.nodes) - 10} more)"
            message = f"{message}; offending nodes: {shown}{more}"
        super().__init__(message)


class BranchError(SurfaceError):
    """A degenerate Möbius branch was routed to the wrong constructor."""


class UnwrapError(SurfaceError):
    """Phase unwrapping is ambiguous on the given mask."""


class NonHolomorphicError(SurfaceError):
    """An operation that assumes holomorphic input received something else."""


class ConfigError(SurfaceError):
    """Invalid CLI configuration."""
