"""Exception hierarchy shared by all numerical modules."""


class LobachevskyError(Exception):
    """Base class for every error raised by this package."""


class NonConvergence(LobachevskyError):
    """An iterative or adaptive procedure exhausted its budget."""


class BadBracket(LobachevskyError):
    """Root bracket endpoints do not have strictly opposite signs."""


class PoleArgument(LobachevskyError):
    """A special function was evaluated at one of its poles."""


class DomainError(LobachevskyError):
    """Argument lies outside the admissible domain (e.g. on a branch cut)."""


class SpectrumError(DomainError):
    """Spectral parameter lies on the spectrum of the free operator."""


class DiagonalSingularity(LobachevskyError):
    """Green's function requested at coincident points."""


class DegenerateLoop(LobachevskyError):
    """Loop encloses (numerically) zero area."""
