"""Minimal graphs in fibered homogeneous 3-spaces.

Builds the coordinate models, closed-form reference/barrier surfaces, the
diverging wedge graph, polygonal boundary contours with prescribed vertical
jumps, a discrete area-minimizing solver over nested geodesic meshes, and
the conjugate curve data (twist profiles and planar mirror curves).
"""

from .spaces import (
    DomainError,
    NumericalError,
    SpaceParams,
    UnsupportedSpaceError,
)

__version__ = "0.1.0"

__all__ = [
    "SpaceParams",
    "DomainError",
    "UnsupportedSpaceError",
    "NumericalError",
    "__version__",
]
