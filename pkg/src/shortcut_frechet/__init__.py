"""Shortcut Frechet distances for polygonal curves in the plane.

The package decides, exactly or approximately, whether a target curve is
within Frechet distance delta of some k-shortcut variant of a base curve,
and ships the supporting machinery: free-space cells, ordered-disk
stabbing wedges, a near-linear variant for c-packed curves, and a
generator for hard instances.
"""

from .geometry import (
    CurveLocation,
    Point2,
    PolygonalCurve,
    Segment,
    curve_frechet_decide,
    segment_to_curve_frechet_decide,
    segment_to_curve_frechet_value,
)
from .tolerances import get_eta, set_eta

__all__ = [
    "CurveLocation",
    "Point2",
    "PolygonalCurve",
    "Segment",
    "curve_frechet_decide",
    "segment_to_curve_frechet_decide",
    "segment_to_curve_frechet_value",
    "get_eta",
    "set_eta",
]

__version__ = "0.1.0"
