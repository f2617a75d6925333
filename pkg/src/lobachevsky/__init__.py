"""Point interactions in a magnetic field on the Lobachevsky plane.

Landau levels and the free Green's function, the Krein Q-function, bound
states of the point-perturbed Hamiltonian, and the Berry phase picked up when
the interaction site is transported around a loop.
"""

from .errors import (
    BadBracket,
    DegenerateLoop,
    DiagonalSingularity,
    DomainError,
    LobachevskyError,
    NonConvergence,
    PoleArgument,
    SpectrumError,
)
from .geometry import CoordinateEllipse, GeodesicCircle, Point, Polyline
from .krein import QConvention, q_closed_form, resolve_convention
from .model import ModelParams, green0, landau_levels, threshold
from .spectral import BoundState, bound_states, intervals

__version__ = "0.1.0"

__all__ = [
    "BadBracket", "DegenerateLoop", "DiagonalSingularity", "DomainError",
    "LobachevskyError", "NonConvergence", "PoleArgument", "SpectrumError",
    "CoordinateEllipse", "GeodesicCircle", "Point", "Polyline",
    "QConvention", "q_closed_form", "resolve_convention",
    "ModelParams", "green0", "landau_levels", "threshold",
    "BoundState", "bound_states", "intervals",
]
