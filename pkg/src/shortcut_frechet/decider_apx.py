"""Grid-approximate decision of the k-shortcut Frechet distance.

The exact decider prices every diagonal tunnel with an ordered-disk
stabbing wedge.  Here the wedge is replaced by something far cheaper: all
candidate tunnel endpoints are snapped to a lattice around the entry
vertex of the target column, each lattice point is priced once against
the subcurve that the tunnel skips, and the convex hull of the affordable
points stands in for the true endpoint region.  Everything a segment from
the tunnel source can reach behind that hull is accepted.  The answer is
one-sided: GREATER_THAN_DELTA is always trustworthy at delta, AT_MOST
certifies distance (3+eps)*delta.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from .freespace import (
    BoundaryInterval,
    FreeCell,
    ReachGenerator,
    cell_free_space,
    outgoing_intervals,
    prune_generators,
    reach_membership,
)
from .geometry import CurveLocation, PolygonalCurve, bounding_scale, dist, dist2, subcurve
from .stabbing import _greedy_batch
from .tolerances import get_eta

AT_MOST_3PLUS_EPS_DELTA = "AT_MOST_3PLUS_EPS_DELTA"
GREATER_THAN_DELTA = "GREATER_THAN_DELTA"

_NEG_INF = float("-inf")


class GridSpec(NamedTuple):
    """The axis-aligned lattice {(spacing*a, spacing*b) : a, b integers}."""

    spacing: float

    def points_in_disk(self, center, radius: float) -> np.ndarray:
        """All lattice points within radius of center, boundary included.

        Returns an (m, 2) array.  The count grows like (radius/spacing)^2,
        so callers keep the ratio bounded.
        """
        g = self.spacing
        if g <= 0.0:
            raise ValueError("grid spacing must be positive")
        cx, cy = float(center[0]), float(center[1])
        ax = np.arange(math.floor((cx - radius) / g),
                       math.ceil((cx + radius) / g) + 1.0)
        ay = np.arange(math.floor((cy - radius) / g),
                       math.ceil((cy + radius) / g) + 1.0)
        gx, gy = np.meshgrid(ax * g, ay * g)
        keep = (gx - cx) ** 2 + (gy - cy) ** 2 <= radius * radius * (1.0 + 1e-12)
        return np.column_stack([gx[keep], gy[keep]])


class _GPoint(NamedTuple):
    """Point in grid units: edge index plus local parameter on each axis."""
    x: float
    y: float


def _keep_left(p: Optional[_GPoint], q: Optional[_GPoint]) -> Optional[_GPoint]:
    if p is None:
        return q
    if q is None:
        return p
    return p if (p.x, p.y) <= (q.x, q.y) else q


def _keep_right(p: Optional[_GPoint], q: Optional[_GPoint]) -> Optional[_GPoint]:
    """Larger x wins; ties pick the smaller y."""
    if p is None:
        return q
    if q is None:
        return p
    return p if (-p.x, p.y) <= (-q.x, q.y) else q


def _point_on(curve: PolygonalCurve, g: float):
    e = max(0, min(int(math.floor(g)), curve.n_edges - 1))
    return curve.edge_point(e, min(max(g - e, 0.0), 1.0))


# ---------------------------------------------------------------------------
# vertical tunnels (shared with the exact decider)
# ---------------------------------------------------------------------------

def vertical_tunnel(l, cell: Tuple[int, int], delta: float,
                    tag=None) -> List[ReachGenerator]:
    """Reach fragment for the vertical tunnel out of a column tracker point.

    A vertical tunnel rides one target column: the shortcut jumps between
    two base points matched to a single target point, so its price never
    exceeds delta once both endpoints sit in free space.  The fragment is
    therefore the whole free region right of the tracker, and delta is
    kept in the signature only for symmetry with the diagonal step.
    `l` needs an `.x` attribute in global grid units (edge + local u).
    """
    if l is None:
        return []
    return [ReachGenerator(0.0, 1.0, l.x - cell[0], tag)]


# ---------------------------------------------------------------------------
# hull scaffolding for the diagonal tunnel
# ---------------------------------------------------------------------------

def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_ccw(pts: np.ndarray) -> List[Tuple[float, float]]:
    """Monotone-chain convex hull, counterclockwise, collinear points dropped."""
    uniq = sorted({(float(p[0]), float(p[1])) for p in pts})
    if len(uniq) <= 2:
        return uniq

    def half(seq):
        out: List[Tuple[float, float]] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(uniq)
    upper = half(uniq[::-1])
    return lower[:-1] + upper[:-1]


def _hull_contains(p, hull: List[Tuple[float, float]], tol: float) -> bool:
    if len(hull) == 1:
        return dist(p, hull[0]) <= tol
    if len(hull) == 2:
        a, b = hull
        t = max(0.0, min(1.0, ((p[0] - a[0]) * (b[0] - a[0]) +
                               (p[1] - a[1]) * (b[1] - a[1])) /
                max(dist2(a, b), 1e-300)))
        return dist(p, (a[0] + t * (b[0] - a[0]),
                        a[1] + t * (b[1] - a[1]))) <= tol
    for idx in range(len(hull)):
        a = hull[idx]
        b = hull[(idx + 1) % len(hull)]
        if _cross(a, b, p) < -tol * dist(a, b):
            return False
    return True


def _support_points(r, hull: List[Tuple[float, float]]):
    """Tangent touch points of the hull seen from the exterior point r.

    Returns (right, left): the hull lies left-or-on of the ray r->right
    and right-or-on of r->left.  Collinear ties pick the farthest vertex.
    """
    n = len(hull)
    right = left = None
    dr = dl = -1.0
    for idx in range(n):
        v = hull[idx]
        c1 = _cross(r, v, hull[idx - 1])
        c2 = _cross(r, v, hull[(idx + 1) % n])
        d2 = dist2(r, v)
        if c1 >= 0.0 and c2 >= 0.0 and d2 > dr:
            right, dr = v, d2
        if c1 <= 0.0 and c2 <= 0.0 and d2 > dl:
            left, dl = v, d2
    return right, left


def _left_halfplane(a, b) -> Optional[Tuple[float, float, float]]:
    """Unit-normal halfplane keeping points left-or-on of the line a->b."""
    nx, ny = b[1] - a[1], a[0] - b[0]
    nn = math.hypot(nx, ny)
    if nn <= 0.0:
        return None
    nx, ny = nx / nn, ny / nn
    return (nx, ny, nx * a[0] + ny * a[1])


class _TunnelFan(NamedTuple):
    """Hull-and-cone summary for one (tracker point, target column) pair.

    halfplanes are (nx, ny, c) with unit normals; a point belongs when
    nx*x + ny*y <= c holds for every row.  whole short-circuits to the
    full cell, empty to nothing.
    """
    empty: bool
    whole: bool
    halfplanes: Tuple[Tuple[float, float, float], ...]


_EMPTY_FAN = _TunnelFan(True, False, ())
_WHOLE_FAN = _TunnelFan(False, True, ())


def _fan_from_eligible(r_pt, elig: np.ndarray, tol: float) -> _TunnelFan:
    if elig.size == 0:
        return _EMPTY_FAN
    hull = _hull_ccw(elig)
    if _hull_contains(r_pt, hull, tol):
        return _WHOLE_FAN
    p_right, p_left = _support_points(r_pt, hull)
    if p_right is None or p_left is None:
        # cannot happen for an exterior point of a proper hull; stay on the
        # inclusive side if float noise ever gets us here
        return _WHOLE_FAN
    planes: List[Tuple[float, float, float]] = []
    for hp in (_left_halfplane(r_pt, p_right), _left_halfplane(p_left, r_pt)):
        if hp is not None:
            planes.append(hp)
    visible = 0
    if len(hull) >= 2:
        for idx in range(len(hull)):
            a = hull[idx]
            b = hull[(idx + 1) % len(hull)]
            if _cross(a, b, r_pt) < 0.0:
                hp = _left_halfplane(a, b)
                if hp is not None:
                    planes.append(hp)
                    visible += 1
    if visible == 0:
        # degenerate: the hull is a point, or a segment collinear with the
        # start.  Cap the fan just beyond the nearest hull vertex.
        pn = min(hull, key=lambda h: dist2(h, r_pt))
        nx, ny = r_pt[0] - pn[0], r_pt[1] - pn[1]
        nn = math.hypot(nx, ny)
        if nn > 0.0:
            nx, ny = nx / nn, ny / nn
            planes.append((nx, ny, nx * pn[0] + ny * pn[1]))
    return _TunnelFan(False, False, tuple(planes))


def _build_fan(target: PolygonalCurve, base: PolygonalCurve, r: _GPoint,
               i: int, eps: float, price: float,
               slack: float) -> Tuple[_TunnelFan, int]:
    """Price the lattice around vertex i from tracker point r.

    Returns the fan plus the number of lattice points examined.  `price`
    is the tunnel budget (call sites pass three times the decision
    threshold), and eligibility is decided at (1+eps)^2 * price.
    """
    v_i = target.vertex(i)
    thr = (1.0 + eps) ** 2 * price
    grid = GridSpec(price * eps / math.sqrt(2.0))
    pts = grid.points_in_disk(v_i, (1.0 + eps) * price)
    if not len(pts):
        return _EMPTY_FAN, 0
    r_pt = _point_on(base, r.y)
    er = max(0, min(int(math.floor(r.x)), target.n_edges - 1))
    ur = min(max(r.x - er, 0.0), 1.0)
    if er + ur > i:
        er, ur = i, 0.0
    sub = subcurve(target, CurveLocation(er, ur), CurveLocation(i, 0.0))
    if dist(r_pt, sub.vertex(0)) > thr + slack:
        return _EMPTY_FAN, len(pts)
    inner = sub.vertices()[1:-1]
    if inner:
        ok = _greedy_batch(r_pt[0], r_pt[1], pts[:, 0], pts[:, 1],
                           [(p[0], p[1]) for p in inner],
                           [thr] * len(inner), slack)
        elig = pts[ok]
    else:
        # nothing is skipped: the whole disk is affordable since every
        # lattice point already lies within (1+eps)*price of v_i
        elig = pts
    return _fan_from_eligible(r_pt, elig, slack), len(pts)


def _clip_unit(seg, halfplanes, tol: float) -> Optional[Tuple[float, float]]:
    """Parameter interval of the segment inside every halfplane, or None."""
    (ax, ay), (bx, by) = seg
    lo, hi = 0.0, 1.0
    for (nx, ny, c) in halfplanes:
        f0 = nx * ax + ny * ay - c
        f1 = nx * bx + ny * by - c
        d = f1 - f0
        if d == 0.0:
            if f0 > tol:
                return None
            continue
        u = (tol - f0) / d
        if d > 0.0:
            hi = min(hi, u)
        else:
            lo = max(lo, u)
        if lo > hi:
            return None
    return (lo, hi)


def _fan_generators(fan: _TunnelFan, base: PolygonalCurve, j: int,
                    tol: float) -> List[ReachGenerator]:
    if fan.empty:
        return []
    if fan.whole:
        return [ReachGenerator(0.0, 1.0, _NEG_INF)]
    iv = _clip_unit(base.edge_segment(j), fan.halfplanes, tol)
    if iv is None:
        return []
    return [ReachGenerator(iv[0], iv[1], _NEG_INF)]


def apx_diagonal_tunnel(target: PolygonalCurve, base: PolygonalCurve,
                        r, target_cell: Tuple[int, int], eps: float,
                        delta: float) -> List[ReachGenerator]:
    """Approximate reach fragment of the diagonal tunnels from r into a cell.

    r = (r_T, r_B) in global grid units is the rightmost already-reachable
    point strictly below and left of the cell; delta is the price budget
    (the decider passes three times its threshold).  The fragment contains
    every endpoint a tunnel of price delta can reach and nothing beyond
    price (1+eps)^2 * delta.  Generators are relative to the cell; the
    intersection with its free space happens in the generator semantics.
    """
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    i, j = target_cell
    scale = bounding_scale(target, base)
    slack = get_eta() * max(scale, delta)
    fan, _ = _build_fan(target, base, _GPoint(float(r[0]), float(r[1])),
                        i, eps, delta, slack)
    return _fan_generators(fan, base, j, slack)


# ---------------------------------------------------------------------------
# the round scan
# ---------------------------------------------------------------------------

class ApxState:
    """Round state of the grid-approximate scan.

    Wall propagation mirrors the exact decider, but per column only the
    most recent cell's outgoing intervals are kept: row_out[i] belongs to
    the current row and is snapshotted into prev_row_out when a new row
    starts, so a cell reads its bottom neighbour from the previous row and
    its left neighbour from the current one.  Between rounds just two
    condensed trackers survive: the rightmost reachable point over the
    lower-left quadrant of every cell, and the leftmost reachable point in
    every column prefix.  Tunnel fans are cached per (tracker, column)
    because the tracker rarely changes along a row.
    """

    def __init__(self, target: PolygonalCurve, base: PolygonalCurve,
                 delta: float, eps: float,
                 cells: Optional[Iterable[Tuple[int, int]]] = None):
        if eps <= 0.0:
            raise ValueError("eps must be positive")
        self.T = target
        self.B = base
        self.delta = float(delta)
        self.eps = float(eps)
        self.delta_p = 3.0 * self.delta
        self.n1 = target.n_edges
        self.n2 = base.n_edges
        self.scale = bounding_scale(target, base)
        self.pad = get_eta() * self.scale
        self.slack = get_eta() * max(self.scale, self.delta_p)
        self.cells = (None if cells is None
                      else {(int(a), int(b)) for (a, b) in cells})
        self._cell_cache: Dict[Tuple[int, int], FreeCell] = {}
        self._fans: Dict[Tuple[float, float, int], _TunnelFan] = {}
        self.quad_prev: Dict[Tuple[int, int], _GPoint] = {}
        self.col_prev: Dict[Tuple[int, int], _GPoint] = {}
        self.row_out: List[Optional[Tuple[Optional[BoundaryInterval],
                                          Optional[BoundaryInterval]]]] = []
        self.prev_row_out: List[Optional[Tuple[Optional[BoundaryInterval],
                                               Optional[BoundaryInterval]]]] = []
        self.reached_round: Optional[int] = None
        self.rounds_run = 0
        self.stats = {"cells_scanned": 0, "fans_built": 0, "grid_points": 0}

    def cell(self, i: int, j: int) -> FreeCell:
        key = (i, j)
        got = self._cell_cache.get(key)
        if got is None:
            got = cell_free_space(self.T, self.B, i, j, self.delta, self.pad)
            self._cell_cache[key] = got
        return got

    def _allowed(self, i: int, j: int) -> bool:
        return self.cells is None or (i, j) in self.cells

    def _fan(self, r: _GPoint, i: int) -> _TunnelFan:
        key = (r.x, r.y, i)
        got = self._fans.get(key)
        if got is None:
            got, npts = _build_fan(self.T, self.B, r, i, self.eps,
                                   self.delta_p, self.slack)
            self._fans[key] = got
            self.stats["fans_built"] += 1
            self.stats["grid_points"] += npts
        return got

    def _cell_gens(self, s: int, i: int, j: int) -> List[ReachGenerator]:
        if not self._allowed(i, j):
            return []
        cell = self.cell(i, j)
        if cell.is_empty():
            return []
        self.stats["cells_scanned"] += 1
        gens: List[ReachGenerator] = []
        left = self.row_out[i - 1] if i > 0 else None
        if left is not None and left[0] is not None:
            gens.append(ReachGenerator(left[0].lo, 1.0, 0.0))
        below = self.prev_row_out[i] if j > 0 else None
        if below is not None and below[1] is not None:
            gens.append(ReachGenerator(0.0, 1.0, below[1].lo))
        if s == 0 and i == 0 and j == 0 and cell.contains(0.0, 0.0):
            gens.append(ReachGenerator(0.0, 1.0, 0.0))
        if s > 0:
            r = self.quad_prev.get((i - 1, j - 1)) if i > 0 and j > 0 else None
            if r is not None:
                gens.extend(_fan_generators(self._fan(r, i), self.B, j,
                                            self.slack))
            l = self.col_prev.get((i, j - 1)) if j > 0 else None
            if l is not None:
                gens.extend(vertical_tunnel(l, (i, j), self.delta))
        return prune_generators(gens) if gens else gens

    def _rightmost(self, i: int, j: int,
                   gens: List[ReachGenerator]) -> Optional[_GPoint]:
        cell = self.cell(i, j)
        ymin: Optional[float] = None
        for g in gens:
            ys = cell.lowest_in(g.y_lo, g.y_hi, g.x_cap)
            if ys is not None:
                ymin = ys if ymin is None else min(ymin, ys)
        if ymin is None:
            return None
        rm = cell.rightmost_at_or_above(ymin)
        if rm is None:
            return None
        return _GPoint(i + rm[0], j + rm[1])

    def _leftmost(self, i: int, j: int,
                  gens: List[ReachGenerator]) -> Optional[_GPoint]:
        cell = self.cell(i, j)
        best: Optional[_GPoint] = None
        for g in gens:
            lm = cell.leftmost_in(g.y_lo, g.y_hi, g.x_cap)
            if lm is not None:
                best = _keep_left(best, _GPoint(i + lm[0], j + lm[1]))
        return best

    def run_round(self, s: int, last: bool = False) -> bool:
        """Scan all cells once with s tunnels spent; True if anything is live.

        With last=True the between-round trackers are not maintained,
        which saves the extremal-point searches of the final round.
        """
        n1, n2 = self.n1, self.n2
        self.row_out = [None] * n1
        track = not last
        quad_cur: Dict[Tuple[int, int], _GPoint] = {}
        col_cur: Dict[Tuple[int, int], _GPoint] = {}
        alive = False
        for j in range(n2):
            self.prev_row_out = self.row_out[:]
            for i in range(n1):
                gens = self._cell_gens(s, i, j)
                if gens:
                    alive = True
                    r_iv, t_iv = outgoing_intervals(self.cell(i, j), gens)
                    self.row_out[i] = (None if r_iv.is_empty else r_iv,
                                       None if t_iv.is_empty else t_iv)
                else:
                    self.row_out[i] = None
                if track:
                    mine_r = self._rightmost(i, j, gens) if gens else None
                    qr = _keep_right(mine_r,
                                     _keep_right(quad_cur.get((i - 1, j)),
                                                 quad_cur.get((i, j - 1))))
                    if qr is not None:
                        quad_cur[(i, j)] = qr
                    mine_l = self._leftmost(i, j, gens) if gens else None
                    cl = _keep_left(mine_l, col_cur.get((i, j - 1)))
                    if cl is not None:
                        col_cur[(i, j)] = cl
                if gens and i == n1 - 1 and j == n2 - 1:
                    if reach_membership(self.cell(i, j), gens, (1.0, 1.0)):
                        self.reached_round = s
        if track:
            self.quad_prev = quad_cur
            self.col_prev = col_cur
        self.rounds_run += 1
        return alive


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

class ApxReport(NamedTuple):
    verdict: str
    shortcuts_used: Optional[int]
    stats: dict


def _decide_with_state(state: ApxState, k: int) -> ApxReport:
    """Endpoint gate plus the round loop, on an already-configured state."""
    gap = state.delta + state.pad
    if (dist(state.T.start(), state.B.start()) > gap
            or dist(state.T.end(), state.B.end()) > gap):
        state.stats["rounds_run"] = 0
        return ApxReport(GREATER_THAN_DELTA, None, state.stats)
    for s in range(k + 1):
        alive = state.run_round(s, last=(s == k))
        if state.reached_round is not None:
            state.stats["rounds_run"] = state.rounds_run
            return ApxReport(AT_MOST_3PLUS_EPS_DELTA, state.reached_round,
                             state.stats)
        if not alive:
            break
    state.stats["rounds_run"] = state.rounds_run
    return ApxReport(GREATER_THAN_DELTA, None, state.stats)


def decide_apx_report(target: PolygonalCurve, base: PolygonalCurve, k: int,
                      delta: float, eps: float,
                      cells: Optional[Iterable[Tuple[int, int]]] = None
                      ) -> ApxReport:
    """Full report of the approximate decision; see decide_apx."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    # the advertised (3+eps) factor needs 3*(1+eps/9)^2 <= 3+eps
    state = ApxState(target, base, delta, eps / 9.0, cells=cells)
    return _decide_with_state(state, k)


def decide_apx(target: PolygonalCurve, base: PolygonalCurve, k: int,
               delta: float, eps: float) -> str:
    """One-sided decision of the k-shortcut Frechet distance.

    Returns GREATER_THAN_DELTA only when the distance truly exceeds delta,
    and AT_MOST_3PLUS_EPS_DELTA only when it is at most (3+eps)*delta.
    Instances between the two thresholds may get either answer.
    """
    return decide_apx_report(target, base, k, delta, eps).verdict
