"""Free-space cells and reachable sets for pairs of curve edges.

A cell compares one edge of the target curve (local coordinate x in [0, 1])
against one edge of the base curve (local coordinate y).  The locus of
parameter pairs whose points lie within distance delta of each other is the
intersection of an ellipse with the unit square, and it is convex.  Reachable
subsets of a cell are stored as unions of a few upward-closed generators
rather than as explicit polygons.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .geometry import PolygonalCurve, segment_segment_distance
from .tolerances import get_eta

_TINY = 1e-14


# ---------------------------------------------------------------------------
# the cell itself
# ---------------------------------------------------------------------------

class FreeCell:
    """Free space of one target edge against one base edge.

    The squared distance between the two moving points is the quadratic form

        Q(x, y) = a x^2 + c y^2 - 2 b x y + 2 d x - 2 e y + f

    and the cell's free region is { Q <= (delta + pad)^2 } inside the unit
    square.  ``pad`` is a tolerance margin in plane units so that membership
    tests stay inclusive near the boundary.
    """

    __slots__ = (
        "i", "j", "delta", "pad", "r", "r2", "_slop",
        "a", "b", "c", "d", "e", "f",
        "_p0", "_u", "_q0", "_v",
        "_yrange", "_splits", "_empty",
    )

    def __init__(self, p0, p1, q0, q1, delta: float, pad: float,
                 i: int = 0, j: int = 0):
        ux, uy = p1[0] - p0[0], p1[1] - p0[1]
        vx, vy = q1[0] - q0[0], q1[1] - q0[1]
        wx, wy = p0[0] - q0[0], p0[1] - q0[1]
        self.i = i
        self.j = j
        self.delta = float(delta)
        self.pad = float(pad)
        self.r = self.delta + self.pad
        self.r2 = self.r * self.r
        self.a = ux * ux + uy * uy
        self.c = vx * vx + vy * vy
        self.b = ux * vx + uy * vy
        self.d = wx * ux + wy * uy
        self.e = wx * vx + wy * vy
        self.f = wx * wx + wy * wy
        # membership re-checks of points that slice roots produced must not
        # flip on the last ulp, so the comparison slack scales with the
        # coefficient magnitudes of Q; for curves within the documented
        # coordinate range it stays far below the pad band
        self._slop = 5e-15 * (1.0 + self.a + self.c + self.f + self.r2
                              + 2.0 * (abs(self.b) + abs(self.d)
                                       + abs(self.e)))
        self._p0 = (float(p0[0]), float(p0[1]))
        self._u = (ux, uy)
        self._q0 = (float(q0[0]), float(q0[1]))
        self._v = (vx, vy)
        self._yrange: Optional[Tuple[float, float]] = None
        self._splits: Optional[List[float]] = None
        self._empty: Optional[bool] = None

    # -- evaluation -----------------------------------------------------

    def value(self, x: float, y: float) -> float:
        """Squared distance between the two edge points at (x, y)."""
        return (self.a * x * x + self.c * y * y - 2.0 * self.b * x * y
                + 2.0 * self.d * x - 2.0 * self.e * y + self.f)

    def contains(self, x: float, y: float) -> bool:
        if x < -1e-12 or x > 1.0 + 1e-12 or y < -1e-12 or y > 1.0 + 1e-12:
            return False
        return self.value(x, y) <= self.r2 + self._slop

    def target_point(self, x: float) -> Tuple[float, float]:
        return (self._p0[0] + x * self._u[0], self._p0[1] + x * self._u[1])

    def base_point(self, y: float) -> Tuple[float, float]:
        return (self._q0[0] + y * self._v[0], self._q0[1] + y * self._v[1])

    # -- emptiness ------------------------------------------------------

    def is_empty(self) -> bool:
        """True when no parameter pair comes within delta + pad.

        Delegates to the closed-form segment distance so every caller that
        needs cell emptiness agrees bit-for-bit with the sweep predicate.
        """
        if self._empty is None:
            seg_t = ((self._p0[0], self._p0[1]),
                     (self._p0[0] + self._u[0], self._p0[1] + self._u[1]))
            seg_b = ((self._q0[0], self._q0[1]),
                     (self._q0[0] + self._v[0], self._q0[1] + self._v[1]))
            dmin = segment_segment_distance(seg_t[0], seg_t[1],
                                            seg_b[0], seg_b[1])
            self._empty = dmin > self.r
        return self._empty

    # -- slices ---------------------------------------------------------

    def x_extent(self, y: float) -> Optional[Tuple[float, float]]:
        """Free x-interval of the horizontal slice at height y, or None."""
        a = self.a
        b2 = self.d - self.b * y
        cc = self.c * y * y - 2.0 * self.e * y + self.f - self.r2
        if a <= _TINY:
            if abs(b2) <= _TINY:
                return (0.0, 1.0) if cc <= 0.0 else None
            t = -cc / (2.0 * b2)
            lo, hi = (0.0, min(1.0, t)) if b2 > 0.0 else (max(0.0, t), 1.0)
        else:
            disc = b2 * b2 - a * cc
            if disc < 0.0:
                return None
            sd = math.sqrt(disc)
            lo = max(0.0, (-b2 - sd) / a)
            hi = min(1.0, (-b2 + sd) / a)
        if lo > hi:
            return None
        return (lo, hi)

    def y_extent(self, x: float) -> Optional[Tuple[float, float]]:
        """Free y-interval of the vertical slice at x, or None."""
        c = self.c
        b2 = -(self.e + self.b * x)
        cc = self.a * x * x + 2.0 * self.d * x + self.f - self.r2
        if c <= _TINY:
            if abs(b2) <= _TINY:
                return (0.0, 1.0) if cc <= 0.0 else None
            t = -cc / (2.0 * b2)
            lo, hi = (0.0, min(1.0, t)) if b2 > 0.0 else (max(0.0, t), 1.0)
        else:
            disc = b2 * b2 - c * cc
            if disc < 0.0:
                return None
            sd = math.sqrt(disc)
            lo = max(0.0, (-b2 - sd) / c)
            hi = min(1.0, (-b2 + sd) / c)
        if lo > hi:
            return None
        return (lo, hi)

    # -- box minimisation ----------------------------------------------

    def min_over_box(self, x0: float, x1: float, y0: float, y1: float
                     ) -> Tuple[float, float, float]:
        """Minimum of Q over an axis box, with its argmin.

        Returns (value, x, y).  The box is assumed non-inverted; callers
        clip to the unit square first.
        """
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.e
        best = (self.value(x0, y0), x0, y0)

        def consider(x: float, y: float) -> None:
            nonlocal best
            v = self.value(x, y)
            if v < best[0]:
                best = (v, x, y)

        det = a * c - b * b
        if det > _TINY:
            xs = (-d * c + b * e) / det
            ys = (a * e - b * d) / det
            if x0 - 1e-12 <= xs <= x1 + 1e-12 and y0 - 1e-12 <= ys <= y1 + 1e-12:
                consider(min(max(xs, x0), x1), min(max(ys, y0), y1))
        # four edges: clamp the 1-d vertex onto each
        if c > _TINY:
            for x in (x0, x1):
                yv = (b * x + e) / c
                consider(x, min(max(yv, y0), y1))
        if a > _TINY:
            for y in (y0, y1):
                xv = (b * y - d) / a
                consider(min(max(xv, x0), x1), y)
        for x in (x0, x1):
            for y in (y0, y1):
                consider(x, y)
        return best

    # -- projections and extreme heights --------------------------------

    def y_range(self) -> Optional[Tuple[float, float]]:
        """Vertical extent of the free region inside the square."""
        if self._yrange is not None:
            return self._yrange if self._yrange[0] <= 1.5 else None
        val, _, sy = self.min_over_box(0.0, 1.0, 0.0, 1.0)
        if val > self.r2 + self._slop:
            self._yrange = (9.0, 9.0)   # sentinel: empty
            return None
        eta = get_eta()

        def feas(y: float) -> bool:
            return self.x_extent(y) is not None

        lo = 0.0 if feas(0.0) else _bisect_first_true(feas, 0.0, sy, eta)
        hi = 1.0 if feas(1.0) else _bisect_last_true(feas, sy, 1.0, eta)
        self._yrange = (lo, hi)
        return self._yrange

    def extreme_heights(self) -> List[float]:
        """Heights where the slice behaviour can change regime.

        Includes the ellipse's own top/bottom, the heights of its leftmost
        and rightmost points, and the crossings of the square's vertical
        sides.  Used as split points before interval bisection.
        """
        if self._splits is not None:
            return self._splits
        out: List[float] = []
        a, b, c, d, e, f, r2 = self.a, self.b, self.c, self.d, self.e, self.f, self.r2
        if a > _TINY:
            aa = c - b * b / a
            bb = e - b * d / a
            ccst = f - d * d / a - r2
            out.extend(_quad_roots(aa, -2.0 * bb, ccst))
        if c > _TINY:
            aa = a - b * b / c
            bb = d - b * e / c
            ccst = f - e * e / c - r2
            for x in _quad_roots(aa, 2.0 * bb, ccst):
                out.append((b * x + e) / c)
        for x in (0.0, 1.0):
            ext = self.y_extent(x)
            if ext is not None:
                out.extend(ext)
        yr = self.y_range()
        if yr is not None:
            out.extend(yr)
        out = sorted({min(1.0, max(0.0, y)) for y in out})
        self._splits = out
        return out

    # -- extreme points of clipped sub-regions ---------------------------

    def leftmost_in(self, band_lo: float, band_hi: float, x_cap: float
                    ) -> Optional[Tuple[float, float]]:
        """Leftmost point of F intersected with a y-band and {x >= x_cap}.

        Ties in x choose the smaller y.  Returns None when the region is
        empty.
        """
        cap = max(0.0, x_cap)
        if cap > 1.0:
            return None
        yr = self.y_range()
        if yr is None:
            return None
        lo = max(band_lo, yr[0])
        hi = min(band_hi, yr[1])
        if lo > hi:
            return None
        val, _, sy = self.min_over_box(cap, 1.0, lo, hi)
        if val > self.r2 + self._slop:
            return None
        eta = get_eta()

        def feas(y: float) -> bool:
            ext = self.x_extent(y)
            return ext is not None and ext[1] >= cap

        fy0 = lo if feas(lo) else _bisect_first_true(feas, lo, sy, eta)
        fy1 = hi if feas(hi) else _bisect_last_true(feas, sy, hi, eta)

        def h(y: float) -> float:
            ext = self.x_extent(y)
            if ext is None or ext[1] < cap:
                return 2.0
            return max(cap, ext[0])

        ys = [fy0, fy1]
        ys.extend(y for y in self.extreme_heights() if fy0 < y < fy1)
        ys.sort()
        vals = [h(y) for y in ys]
        k = min(range(len(ys)), key=lambda t: (vals[t], ys[t]))
        a_lo = ys[k - 1] if k > 0 else ys[k]
        a_hi = ys[k + 1] if k + 1 < len(ys) else ys[k]
        ym, hm = _ternary_min(h, a_lo, a_hi, eta)
        if vals[k] < hm:
            ym, hm = ys[k], vals[k]
        # flat stretches appear when the cap (or the x = 0 side) is active;
        # walk down to the lowest height that still achieves the minimum
        flat = lambda y: h(y) <= hm + 1e-12
        if fy0 < ym and flat(fy0):
            ym = fy0
        elif fy0 < ym:
            y_first = _bisect_first_true(flat, fy0, ym, eta)
            if y_first < ym:
                ym = y_first
        hm = h(ym)
        return (hm, ym)

    def lowest_in(self, band_lo: float, band_hi: float,
                  x_cap: float) -> Optional[float]:
        """Smallest height reached by F within a y-band and {x >= x_cap}."""
        cap = max(0.0, x_cap)
        if cap > 1.0:
            return None
        yr = self.y_range()
        if yr is None:
            return None
        lo = max(band_lo, yr[0])
        hi = min(band_hi, yr[1])
        if lo > hi:
            return None
        val, _, sy = self.min_over_box(cap, 1.0, lo, hi)
        if val > self.r2 + self._slop:
            return None

        def feas(y: float) -> bool:
            ext = self.x_extent(y)
            return ext is not None and ext[1] >= cap

        return lo if feas(lo) else _bisect_first_true(feas, lo, sy, get_eta())

    def rightmost_at_or_above(self, ymin: float
                              ) -> Optional[Tuple[float, float]]:
        """Rightmost point of F among heights >= ymin; ties pick smaller y."""
        yr = self.y_range()
        if yr is None:
            return None
        lo = max(ymin, yr[0])
        hi = yr[1]
        if lo > hi:
            return None
        eta = get_eta()

        def g(y: float) -> float:
            ext = self.x_extent(y)
            return ext[1] if ext is not None else -1.0

        ys = [lo, hi]
        ys.extend(y for y in self.extreme_heights() if lo < y < hi)
        ys.sort()
        vals = [g(y) for y in ys]
        k = min(range(len(ys)), key=lambda t: (-vals[t], ys[t]))
        a_lo = ys[k - 1] if k > 0 else ys[k]
        a_hi = ys[k + 1] if k + 1 < len(ys) else ys[k]
        ym, gneg = _ternary_min(lambda y: -g(y), a_lo, a_hi, eta)
        gm = -gneg
        if vals[k] > gm:
            ym, gm = ys[k], vals[k]
        flat = lambda y: g(y) >= gm - 1e-12
        if lo < ym and flat(lo):
            ym = lo
        elif lo < ym:
            y_first = _bisect_first_true(flat, lo, ym, eta)
            if y_first < ym:
                ym = y_first
        return (g(ym), ym)


def cell_free_space(target: PolygonalCurve, base: PolygonalCurve,
                    i: int, j: int, delta: float,
                    pad: Optional[float] = None) -> FreeCell:
    """Build the free-space cell for target edge i against base edge j."""
    if not (0 <= i < target.n_edges and 0 <= j < base.n_edges):
        raise IndexError("edge index out of range")
    if pad is None:
        from .geometry import bounding_scale
        pad = get_eta() * bounding_scale(target, base)
    p0 = target.pts[i]
    p1 = target.pts[i + 1]
    q0 = base.pts[j]
    q1 = base.pts[j + 1]
    return FreeCell(p0, p1, q0, q1, delta, pad, i=i, j=j)


# ---------------------------------------------------------------------------
# reachable subsets
# ---------------------------------------------------------------------------

class ReachGenerator(NamedTuple):
    """One upward-closed piece of a cell's reachable set.

    The region described is the up-right closure, within the cell's free
    space, of the seed  F  intersected with the band y_lo <= y <= y_hi and
    the half-plane x >= x_cap.  ``tag`` carries provenance for witness
    recovery and never affects geometry.
    """
    y_lo: float
    y_hi: float
    x_cap: float
    tag: object = None


class BoundaryInterval(NamedTuple):
    """Reachable stretch of a cell's outgoing (right or top) boundary."""
    side: str
    lo: float
    hi: float

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi


def box_hits_free(cell: FreeCell, x0: float, x1: float,
                  y0: float, y1: float) -> bool:
    """Does the free region meet the given axis box?"""
    x0 = max(x0, 0.0)
    y0 = max(y0, 0.0)
    x1 = min(x1, 1.0)
    y1 = min(y1, 1.0)
    if x0 > x1 or y0 > y1:
        return False
    val, _, _ = cell.min_over_box(x0, x1, y0, y1)
    return val <= cell.r2 + cell._slop


def _box_free_witness(cell: FreeCell, x0: float, x1: float,
                      y0: float, y1: float) -> Optional[Tuple[float, float]]:
    x0 = max(x0, 0.0)
    y0 = max(y0, 0.0)
    x1 = min(x1, 1.0)
    y1 = min(y1, 1.0)
    if x0 > x1 or y0 > y1:
        return None
    val, wx, wy = cell.min_over_box(x0, x1, y0, y1)
    if val > cell.r2 + cell._slop:
        return None
    return (wx, wy)


def reach_membership(cell: FreeCell, gens: Sequence[ReachGenerator],
                     q: Tuple[float, float]) -> bool:
    """Is the cell-local point q inside the union of generator regions?"""
    x, y = q
    if not cell.contains(x, y):
        return False
    for g in gens:
        if y < g.y_lo:
            continue
        if box_hits_free(cell, g.x_cap, x, g.y_lo, min(g.y_hi, y)):
            return True
    return False


def reach_witness(cell: FreeCell, gens: Sequence[ReachGenerator],
                  q: Tuple[float, float]
                  ) -> Optional[Tuple[ReachGenerator, Tuple[float, float]]]:
    """Membership plus the generator and seed point that certify it."""
    x, y = q
    if not cell.contains(x, y):
        return None
    for g in gens:
        if y < g.y_lo:
            continue
        w = _box_free_witness(cell, g.x_cap, x, g.y_lo, min(g.y_hi, y))
        if w is not None:
            return (g, w)
    return None


def prune_generators(gens: Sequence[ReachGenerator]) -> List[ReachGenerator]:
    """Drop generators whose region is covered by another one's."""
    kept: List[ReachGenerator] = []
    for g in gens:
        dominated = False
        for h in kept:
            if h.y_lo <= g.y_lo and h.y_hi >= g.y_hi and h.x_cap <= g.x_cap:
                dominated = True
                break
        if dominated:
            continue
        kept = [h for h in kept
                if not (g.y_lo <= h.y_lo and g.y_hi >= h.y_hi
                        and g.x_cap <= h.x_cap)]
        kept.append(g)
    return kept


def outgoing_intervals(cell: FreeCell, gens: Sequence[ReachGenerator]
                       ) -> Tuple[BoundaryInterval, BoundaryInterval]:
    """Reachable intervals on the right (x=1) and top (y=1) boundaries.

    Membership along each boundary is monotone (the set is up-right closed
    inside a convex cell), so each boundary carries at most one interval.
    """
    eta = get_eta()
    right = BoundaryInterval("right", 1.0, 0.0)
    top = BoundaryInterval("top", 1.0, 0.0)
    if gens:
        # points on the free slice of a wall are free by construction, so
        # the wall predicates only check the box condition
        ext = cell.y_extent(1.0)
        if ext is not None:
            def mem_r(y: float) -> bool:
                for g in gens:
                    if y >= g.y_lo and box_hits_free(cell, g.x_cap, 1.0,
                                                    g.y_lo, min(g.y_hi, y)):
                        return True
                return False

            if mem_r(ext[0]):
                right = BoundaryInterval("right", ext[0], ext[1])
            elif mem_r(ext[1]):
                lo = _bisect_first_true(mem_r, ext[0], ext[1], eta)
                right = BoundaryInterval("right", lo, ext[1])
        ext = cell.x_extent(1.0)
        if ext is not None:
            def mem_t(x: float) -> bool:
                for g in gens:
                    if box_hits_free(cell, g.x_cap, x, g.y_lo, g.y_hi):
                        return True
                return False

            if mem_t(ext[0]):
                top = BoundaryInterval("top", ext[0], ext[1])
            elif mem_t(ext[1]):
                lo = _bisect_first_true(mem_t, ext[0], ext[1], eta)
                top = BoundaryInterval("top", lo, ext[1])
    return right, top


def project_to_base_edge(cell: FreeCell, gens: Sequence[ReachGenerator]
                         ) -> List[Tuple[float, float]]:
    """Base-edge parameter intervals covered by the reachable set.

    A height y is covered when some point (x, y) lies in the set; per
    generator that reduces to a one-dimensional predicate on y.  The
    predicate is not assumed monotone: candidate split heights come from
    the cell's regime changes, and flips are localised by bisection.
    """
    eta = get_eta()
    yr = cell.y_range()
    if yr is None or not gens:
        return []
    out: List[Tuple[float, float]] = []
    for g in gens:
        def pr(y: float, _g=g) -> bool:
            ext = cell.x_extent(y)
            if ext is None:
                return False
            return box_hits_free(cell, _g.x_cap, ext[1],
                                 _g.y_lo, min(_g.y_hi, y))

        lo = max(yr[0], 0.0)
        hi = min(yr[1], 1.0)
        if lo > hi:
            continue
        splits = [lo, hi]
        splits.extend(y for y in cell.extreme_heights() if lo < y < hi)
        for y in (g.y_lo, g.y_hi):
            if lo < y < hi:
                splits.append(y)
        splits = sorted(set(splits))
        probes: List[float] = []
        for s0, s1 in zip(splits, splits[1:]):
            probes.append(s0)
            probes.append(0.5 * (s0 + s1))
        probes.append(splits[-1])
        flags = [pr(y) for y in probes]
        idx = 0
        while idx < len(probes):
            if not flags[idx]:
                idx += 1
                continue
            start_i = idx
            while idx + 1 < len(probes) and flags[idx + 1]:
                idx += 1
            end_i = idx
            lo_y = probes[start_i]
            if start_i > 0:
                lo_y = _bisect_first_true(pr, probes[start_i - 1],
                                          probes[start_i], eta)
            hi_y = probes[end_i]
            if end_i + 1 < len(probes):
                hi_y = _bisect_last_true(pr, probes[end_i],
                                         probes[end_i + 1], eta)
            out.append((lo_y, hi_y))
            idx += 1
    return merge_intervals(out, eta)


def merge_intervals(intervals: Sequence[Tuple[float, float]],
                    slack: float = 0.0) -> List[Tuple[float, float]]:
    """Union of closed intervals; drops slivers shorter than slack."""
    ivs = sorted((lo, hi) for lo, hi in intervals if hi - lo >= slack)
    merged: List[Tuple[float, float]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1] + slack:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


# ---------------------------------------------------------------------------
# numeric search helpers
# ---------------------------------------------------------------------------

def _bisect_first_true(pred, lo: float, hi: float, tol: float) -> float:
    """Smallest t in [lo, hi] with pred(t), given pred(hi) holds."""
    if pred(lo):
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _bisect_last_true(pred, lo: float, hi: float, tol: float) -> float:
    """Largest t in [lo, hi] with pred(t), given pred(lo) holds."""
    if pred(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _ternary_min(fn, lo: float, hi: float, tol: float
                 ) -> Tuple[float, float]:
    """Minimise a unimodal function on [lo, hi]."""
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if fn(m1) <= fn(m2):
            hi = m2
        else:
            lo = m1
    mid = 0.5 * (lo + hi)
    return mid, fn(mid)


def _quad_roots(aa: float, bb: float, cc: float) -> List[float]:
    """Real roots of aa t^2 + bb t + cc = 0 (possibly degenerate)."""
    if abs(aa) <= _TINY:
        if abs(bb) <= _TINY:
            return []
        return [-cc / bb]
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0.0:
        return []
    sd = math.sqrt(disc)
    return [(-bb - sd) / (2.0 * aa), (-bb + sd) / (2.0 * aa)]
