"""Planar primitives, polygonal curves, and Fréchet-distance kernels.

Conventions used across the package:
  * points are (x, y) pairs; Point2 is a NamedTuple so plain tuples work too
  * a curve location is (edge index, local u in [0, 1]); the global [0, 1]
    parameter gives every edge a uniform share regardless of length
  * all edge indices are 0-based
"""
from __future__ import annotations

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .tolerances import get_eta


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point2
    b: Point2


class CurveLocation(NamedTuple):
    edge: int
    u: float


# ----------------------------------------------------------------------
# small vector helpers (index-based so raw tuples are accepted)
# ----------------------------------------------------------------------

def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def dist2(p, q) -> float:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def lerp(p, q, t: float) -> Point2:
    return Point2(p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def point_segment_distance(p, a, b) -> float:
    """Distance from point p to the closed segment a-b."""
    wx = b[0] - a[0]
    wy = b[1] - a[1]
    ww = wx * wx + wy * wy
    if ww <= 0.0:
        return dist(p, a)
    t = ((p[0] - a[0]) * wx + (p[1] - a[1]) * wy) / ww
    t = min(1.0, max(0.0, t))
    return dist(p, (a[0] + t * wx, a[1] + t * wy))


def segment_segment_distance(a0, a1, b0, b1) -> float:
    """Minimum distance between two closed segments."""
    if _segments_cross(a0, a1, b0, b1):
        return 0.0
    return min(
        point_segment_distance(a0, b0, b1),
        point_segment_distance(a1, b0, b1),
        point_segment_distance(b0, a0, a1),
        point_segment_distance(b1, a0, a1),
    )


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _segments_cross(a0, a1, b0, b1) -> bool:
    d1 = _orient(b0, b1, a0)
    d2 = _orient(b0, b1, a1)
    d3 = _orient(a0, a1, b0)
    d4 = _orient(a0, a1, b1)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
       ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    return False


def disk_slice_of_edge(center, e0, e1, radius: float) -> Optional[Tuple[float, float]]:
    """Parameter interval of edge e0-e1 inside the closed disk, or None.

    Returns (t_lo, t_hi) clamped to [0, 1].
    """
    wx = e0[0] - center[0]
    wy = e0[1] - center[1]
    vx = e1[0] - e0[0]
    vy = e1[1] - e0[1]
    a = vx * vx + vy * vy
    b = wx * vx + wy * vy
    c = wx * wx + wy * wy - radius * radius
    if a <= 0.0:
        return (0.0, 1.0) if c <= 0.0 else None
    disc = b * b - a * c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    lo = (-b - root) / a
    hi = (-b + root) / a
    lo = max(0.0, lo)
    hi = min(1.0, hi)
    if lo > hi:
        return None
    return (lo, hi)


# ----------------------------------------------------------------------
# curves
# ----------------------------------------------------------------------

class PolygonalCurve:
    """Ordered planar vertex sequence with piecewise-linear interpolation.

    Consecutive duplicate vertices are merged on construction; a curve that
    collapses to a single position keeps one degenerate edge so the cell
    grids of the deciders stay non-empty.
    """

    __slots__ = ("pts", "_bbox")

    def __init__(self, vertices: Sequence, collapse: bool = True):
        arr = np.asarray([(float(v[0]), float(v[1])) for v in vertices], dtype=float)
        if arr.size == 0:
            raise ValueError("curve needs at least one vertex")
        if not np.all(np.isfinite(arr)):
            raise ValueError("curve vertices must be finite")
        if collapse and len(arr) > 1:
            keep = [0]
            for idx in range(1, len(arr)):
                if arr[idx, 0] != arr[keep[-1], 0] or arr[idx, 1] != arr[keep[-1], 1]:
                    keep.append(idx)
            arr = arr[keep]
        if len(arr) == 1:
            arr = np.vstack([arr, arr])
        self.pts = arr
        self._bbox: Tuple[float, float, float, float] | None = None

    # -- basic accessors ------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.pts)

    @property
    def n_edges(self) -> int:
        return len(self.pts) - 1

    def vertex(self, i: int) -> Point2:
        return Point2(float(self.pts[i, 0]), float(self.pts[i, 1]))

    def vertices(self) -> List[Point2]:
        return [Point2(float(x), float(y)) for x, y in self.pts]

    def edge_segment(self, i: int) -> Segment:
        return Segment(self.vertex(i), self.vertex(i + 1))

    def edge_point(self, i: int, u: float) -> Point2:
        a = self.pts[i]
        b = self.pts[i + 1]
        return Point2(float(a[0] + u * (b[0] - a[0])),
                      float(a[1] + u * (b[1] - a[1])))

    def start(self) -> Point2:
        return self.vertex(0)

    def end(self) -> Point2:
        return self.vertex(self.n_vertices - 1)

    def length(self) -> float:
        diffs = np.diff(self.pts, axis=0)
        return float(np.sum(np.hypot(diffs[:, 0], diffs[:, 1])))

    def bbox(self) -> Tuple[float, float, float, float]:
        if self._bbox is None:
            self._bbox = (
                float(self.pts[:, 0].min()), float(self.pts[:, 1].min()),
                float(self.pts[:, 0].max()), float(self.pts[:, 1].max()),
            )
        return self._bbox

    # -- parameterization ----------------------------------------------

    def loc_units(self, loc: CurveLocation) -> float:
        """Location as edge + u, for ordering comparisons."""
        return loc[0] + loc[1]

    def loc_from_param(self, t: float) -> CurveLocation:
        """Global parameter in [0, 1] to a curve location."""
        t = min(1.0, max(0.0, t))
        g = t * self.n_edges
        e = min(self.n_edges - 1, int(math.floor(g)))
        return CurveLocation(e, g - e)

    def param_of(self, loc: CurveLocation) -> float:
        return (loc[0] + loc[1]) / self.n_edges

    def point_at_param(self, t: float) -> Point2:
        return point_at(self, self.loc_from_param(t))

    def __repr__(self) -> str:
        return f"PolygonalCurve({self.n_vertices} vertices)"


def bounding_scale(*curves: PolygonalCurve) -> float:
    """Diameter of the joint bounding box; at least 1 so relative
    tolerances stay meaningful for tiny inputs."""
    xs0 = min(c.bbox()[0] for c in curves)
    ys0 = min(c.bbox()[1] for c in curves)
    xs1 = max(c.bbox()[2] for c in curves)
    ys1 = max(c.bbox()[3] for c in curves)
    return max(1.0, math.hypot(xs1 - xs0, ys1 - ys0))


def point_at(curve: PolygonalCurve, loc: CurveLocation) -> Point2:
    """Point of the curve at an (edge, u) location."""
    e, u = loc[0], loc[1]
    if e < 0 or e >= curve.n_edges:
        raise ValueError(f"edge index {e} out of range [0, {curve.n_edges})")
    return lerp(curve.pts[e], curve.pts[e + 1], u)


def subcurve(curve: PolygonalCurve, frm: CurveLocation, to: CurveLocation) -> PolygonalCurve:
    """The sub-polyline between two locations (inclusive endpoints).

    Degenerate zero-length output is allowed when frm == to.
    """
    g0 = curve.loc_units(frm)
    g1 = curve.loc_units(to)
    if g0 > g1:
        raise ValueError("subcurve endpoints out of order")
    p0 = point_at(curve, frm)
    p1 = point_at(curve, to)
    verts: List = [p0]
    lo = int(math.floor(g0)) + 1
    hi = int(math.ceil(g1)) - 1
    for v in range(lo, hi + 1):
        if g0 < float(v) < g1:
            verts.append(curve.vertex(v))
    verts.append(p1)
    return PolygonalCurve(verts)


# ----------------------------------------------------------------------
# Fréchet kernels
# ----------------------------------------------------------------------

def apply_shortcuts(base: PolygonalCurve,
                    pairs: Sequence[Tuple[CurveLocation, CurveLocation]]
                    ) -> PolygonalCurve:
    """Replace the subcurve between each (start, end) pair by a segment.

    Pairs must appear in curve order and must not overlap.  The result is
    the shortcut curve: it keeps the base curve's endpoints.
    """
    verts: List = []
    cursor = CurveLocation(0, 0.0)
    for s, t in pairs:
        if base.loc_units(s) < base.loc_units(cursor) - 1e-12:
            raise ValueError("shortcut pairs overlap or are out of order")
        if base.loc_units(t) < base.loc_units(s):
            raise ValueError("shortcut end precedes its start")
        piece = subcurve(base, cursor, s)
        verts.extend(piece.vertices())
        verts.append(point_at(base, t))
        cursor = t
    tail = subcurve(base, cursor, CurveLocation(base.n_edges - 1, 1.0))
    verts.extend(tail.vertices())
    return PolygonalCurve(verts)


def segment_frechet(s1: Segment, s2: Segment) -> float:
    """Fréchet distance of two segments: max of the endpoint distances."""
    return max(dist(s1[0], s2[0]), dist(s1[1], s2[1]))


def segment_to_curve_frechet_decide(seg: Segment, curve: PolygonalCurve,
                                    delta: float, slack: float = 0.0) -> bool:
    """Exact decision d_F(seg, curve) <= delta.

    Endpoints must match within delta and the segment must pierce the
    delta-disks of the curve's interior vertices in order.  The optional
    slack inflates the disks (decider call sites pass eta*scale to keep
    exactly-tangent configurations inside).
    """
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    from .stabbing import Disk, stabs_ordered_disks
    r = delta + slack
    if dist(seg[0], curve.start()) > r or dist(seg[1], curve.end()) > r:
        return False
    disks = [Disk(curve.vertex(i), delta) for i in range(1, curve.n_vertices - 1)]
    return stabs_ordered_disks(seg, disks, slack=slack)


def segment_to_curve_frechet_value(seg: Segment, curve: PolygonalCurve,
                                   tol: float) -> float:
    """d_F(seg, curve) to within tol, by bisection over the decision."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lo = max(dist(seg[0], curve.start()), dist(seg[1], curve.end()))
    if curve.n_vertices <= 2:
        return lo
    hi = lo + max(point_segment_distance(curve.vertex(i), seg[0], seg[1])
                  for i in range(1, curve.n_vertices - 1))
    # the additive bound can undershoot when the curve doubles back, so
    # grow toward the always-valid cap before bisecting
    cap = max(max(dist(curve.vertex(i), seg[0]), dist(curve.vertex(i), seg[1]))
              for i in range(curve.n_vertices))
    while hi < cap and not segment_to_curve_frechet_decide(seg, curve, hi):
        hi = min(cap, lo + 2.0 * (hi - lo) + tol)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if segment_to_curve_frechet_decide(seg, curve, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _edge_free_interval(p, e0, e1, delta: float) -> Optional[Tuple[float, float]]:
    return disk_slice_of_edge(p, e0, e1, delta)


def curve_frechet_decide(c1: PolygonalCurve, c2: PolygonalCurve, delta: float) -> bool:
    """Classical free-space decision d_F(c1, c2) <= delta.

    Independent of the generator machinery in `freespace`; serves as the
    k = 0 baseline.
    """
    if delta < 0.0:
        return False
    P = c1.pts
    Q = c2.pts
    n1 = len(P) - 1
    n2 = len(Q) - 1
    if dist(P[0], Q[0]) > delta or dist(P[-1], Q[-1]) > delta:
        return False

    # top_reach[i]: reachable x-interval on the top boundary of the cell in
    # the previous row of column i (None = unreachable)
    top_reach: List[Optional[Tuple[float, float]]] = [None] * n1
    for j in range(n2):
        left_reach: Optional[Tuple[float, float]] = (0.0, 0.0) if j == 0 else None
        if j > 0:
            # left boundary of the row's first cell is the diagram edge
            left_reach = None
        for i in range(n1):
            bottom_entry = top_reach[i] if j > 0 else None
            if i == 0 and j == 0:
                left_entry: Optional[Tuple[float, float]] = (0.0, 0.0)
            else:
                left_entry = left_reach
            # free intervals on the outgoing boundaries
            right_free = _edge_free_interval(P[i + 1], Q[j], Q[j + 1], delta)
            top_free = _edge_free_interval(Q[j + 1], P[i], P[i + 1], delta)
            if left_entry is None and bottom_entry is None:
                right_reach = None
                top_out = None
            else:
                if bottom_entry is not None:
                    right_reach = right_free
                else:
                    right_reach = None
                    if right_free is not None and left_entry is not None:
                        lo = max(right_free[0], left_entry[0])
                        if lo <= right_free[1]:
                            right_reach = (lo, right_free[1])
                if left_entry is not None:
                    top_out = top_free
                else:
                    top_out = None
                    if top_free is not None and bottom_entry is not None:
                        lo = max(top_free[0], bottom_entry[0])
                        if lo <= top_free[1]:
                            top_out = (lo, top_free[1])
            if i == n1 - 1 and j == n2 - 1:
                if left_entry is not None or bottom_entry is not None:
                    return True
                return False
            left_reach = right_reach
            top_reach[i] = top_out
    return False
