"""Geometric random trees, their directed forests, and Monte Carlo experiments."""

__version__ = "0.1.0"

from .errors import (
    BoundaryExhaustedError,
    GeotreeError,
    InvalidInputError,
    InvariantViolationError,
)
from .point_process import (
    AnnulusSector,
    Ball,
    Cylinder,
    GridIndex,
    HalfStrip,
    PointSample,
    Window,
    query_region,
    sample_ppp,
    thin_ball,
)
from .trees import NO_ANCESTOR, AncestorTree, GeodesicPath, RadialBranch

__all__ = [
    "__version__",
    "GeotreeError",
    "InvalidInputError",
    "BoundaryExhaustedError",
    "InvariantViolationError",
    "Window",
    "PointSample",
    "GridIndex",
    "Ball",
    "HalfStrip",
    "Cylinder",
    "AnnulusSector",
    "sample_ppp",
    "thin_ball",
    "query_region",
    "AncestorTree",
    "GeodesicPath",
    "RadialBranch",
    "NO_ANCESTOR",
]
