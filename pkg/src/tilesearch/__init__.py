"""Exhaustive combinatorial-geometric search for convex-polygon tilings
of squares and rectangles."""

__version__ = "0.1.0"

from .planegraph import (
    CandidatePair,
    PlaneGraph,
    canonical_code,
    check_three_connected,
    extract_candidates,
    parse_planar_code,
    plane_graph,
)

__all__ = [
    "CandidatePair",
    "PlaneGraph",
    "canonical_code",
    "check_three_connected",
    "extract_candidates",
    "parse_planar_code",
    "plane_graph",
    "__version__",
]
