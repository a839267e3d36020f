"""Exception types shared across the package."""


class KobalabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(KobalabError):
    """Malformed or inconsistent experiment configuration."""


class OutsideDomain(KobalabError):
    """A point expected to lie inside the domain does not."""


class NotOnBoundary(KobalabError):
    """A point expected to lie on the boundary does not."""


class NonSmoothPoint(KobalabError):
    """The profile has no well-defined derivative at the requested abscissa."""


class OutOfRange(KobalabError):
    """An argument lies outside the range where the quantity is defined."""


class EscapedDepthCap(KobalabError):
    """A constructed curve left the controlled boundary layer."""


class BalanceViolation(KobalabError):
    """No parameter satisfying the requested balance condition was bracketed."""


class NonFiniteIntegrand(KobalabError):
    """An integrand evaluated to a non-finite value."""


class ZeroDirection(KobalabError):
    """A direction vector was identically zero."""


class DisconnectedGrid(KobalabError):
    """Two query points fell in different components of a distance grid."""


class AttachmentFailure(KobalabError):
    """A query point could not be attached to any grid node."""
