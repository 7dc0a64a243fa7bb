"""Rectangular spatial treemaps for two-level rectilinear layouts.

Convert a layout of rectangle cells grouped into regions to a treemap in
which every region is a rectangle, all oriented internal adjacencies
survive, and as many external cell adjacencies as possible are kept —
for a fixed target arrangement of the regions, over all arrangements
sharing the input's extended dual, or ignoring adjacency orientations.
"""

from .geometry import (
    Adjacency,
    BoundarySegment,
    Cell,
    Direction,
    GlobalLayout,
    Rect,
    RectComplex,
    TwoLevelLayout,
    Violation,
    boundary_walk,
    bounding_box,
    canonical_adjacencies,
    compress_layout,
    compute_adjacencies,
    is_convex,
    validate_layout,
)

__all__ = [
    "Adjacency",
    "BoundarySegment",
    "Cell",
    "Direction",
    "GlobalLayout",
    "Rect",
    "RectComplex",
    "TwoLevelLayout",
    "Violation",
    "boundary_walk",
    "bounding_box",
    "canonical_adjacencies",
    "compress_layout",
    "compute_adjacencies",
    "is_convex",
    "validate_layout",
]

__version__ = "0.1.0"
