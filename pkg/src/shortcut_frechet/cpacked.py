"""Fast path for c-packed inputs.

Simplify both curves, list the non-empty free-space cells with an x-sweep
over capsule boundaries, and run the grid-approximate scan restricted to
those cells.  The packedness probe is reporting-only; nothing in the
decision path trusts it.
"""

from __future__ import annotations

import heapq
import math
import random
from typing import Dict, Iterable, List, NamedTuple, Set, Tuple

import numpy as np

from .decider_apx import ApxReport, ApxState, _decide_with_state
from .freespace import cell_free_space
from .geometry import (
    PolygonalCurve,
    Segment,
    bounding_scale,
    dist,
    point_segment_distance,
    segment_segment_distance,
)
from .tolerances import get_eta


# ---------------------------------------------------------------------------
# capsules and cell sets
# ---------------------------------------------------------------------------

class Capsule(NamedTuple):
    """Neighbourhood of a segment: two cap arcs joined by straight sides."""

    segment: Segment
    radius: float

    def x_range(self) -> Tuple[float, float]:
        a, b = self.segment
        return (min(a[0], b[0]) - self.radius, max(a[0], b[0]) + self.radius)

    def y_range(self) -> Tuple[float, float]:
        a, b = self.segment
        return (min(a[1], b[1]) - self.radius, max(a[1], b[1]) + self.radius)

    def breakpoints(self) -> List[float]:
        """Sweep abscissas where the boundary switches between arc and side.

        The outermost two are the cap extremes; the inner ones are the
        tangent points where the straight sides meet the end arcs.
        """
        (ax, ay), (bx, by) = self.segment
        r = self.radius
        xs = [min(ax, bx) - r, max(ax, bx) + r]
        dx, dy = bx - ax, by - ay
        nn = math.hypot(dx, dy)
        if nn > 0.0 and r > 0.0:
            off = r * (-dy / nn)
            for px in (ax, bx):
                xs.append(px + off)
                xs.append(px - off)
        return sorted(xs)

    def contains(self, p, pad: float = 0.0) -> bool:
        a, b = self.segment
        return point_segment_distance(p, a, b) <= self.radius + pad


class CellSet:
    """Sorted duplicate-free (i, j) edge-index pairs, lexicographic order."""

    __slots__ = ("pairs", "_members")

    def __init__(self, pairs: Iterable[Tuple[int, int]]):
        self.pairs = tuple(sorted({(int(i), int(j)) for i, j in pairs}))
        self._members = frozenset(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, cell) -> bool:
        return (int(cell[0]), int(cell[1])) in self._members

    def __eq__(self, other) -> bool:
        if isinstance(other, CellSet):
            return self.pairs == other.pairs
        return self.pairs == tuple(other)

    def __repr__(self) -> str:
        return f"CellSet({len(self.pairs)} cells)"


# ---------------------------------------------------------------------------
# simplification and packedness
# ---------------------------------------------------------------------------

def simplify(curve: PolygonalCurve, mu: float) -> PolygonalCurve:
    """Greedy mu-simplification.

    Walk the vertices keeping the first one at distance at least mu from
    the last kept vertex; the final vertex is always kept.  Every output
    edge except possibly the last is then at least mu long.
    """
    if mu < 0.0:
        raise ValueError("mu must be non-negative")
    pts = curve.vertices()
    kept = [pts[0]]
    for idx in range(1, len(pts)):
        if dist(pts[idx], kept[-1]) >= mu:
            kept.append(pts[idx])
    if kept[-1] != pts[-1]:
        kept.append(pts[-1])
    return PolygonalCurve(kept)


def _best_ratio_at(curve: PolygonalCurve, center, radii) -> float:
    """max over radii of (curve length inside the ball) / radius."""
    p0 = curve.pts[:-1]
    dvec = curve.pts[1:] - p0
    a = (dvec ** 2).sum(-1)
    off = p0 - np.asarray(center, dtype=float)
    b = 2.0 * (dvec * off).sum(-1)
    c0 = (off ** 2).sum(-1)
    rr = np.asarray(radii, dtype=float)
    A = a[:, None]
    B = b[:, None]
    C = c0[:, None] - rr[None, :] ** 2
    disc = B * B - 4.0 * A * C
    has = (disc > 0.0) & (A > 0.0)
    sq = np.sqrt(np.where(has, disc, 0.0))
    denom = np.where(A > 0.0, 2.0 * A, 1.0)
    t_lo = np.clip(np.where(has, (-B - sq) / denom, 1.0), 0.0, 1.0)
    t_hi = np.clip(np.where(has, (-B + sq) / denom, 0.0), 0.0, 1.0)
    length = np.sqrt(a)[:, None] * np.maximum(t_hi - t_lo, 0.0)
    return float((length.sum(0) / rr).max(initial=0.0))


def packedness_estimate(curve: PolygonalCurve, samples: int = 1) -> float:
    """Lower bound on the packedness constant c of a curve.

    Candidate balls sit at vertices and edge midpoints with radii drawn
    from the pairwise vertex distances and their halves; `samples` extra
    center/radius pairs come from a fixed-seed generator, so the estimate
    never decreases when samples grows.  Reporting only: the true c is at
    least the returned value, and no correctness path depends on it.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    pts = curve.pts
    centers = np.vstack([pts, 0.5 * (pts[:-1] + pts[1:])])
    gaps = np.sqrt(((pts[None, :, :] - pts[:, None, :]) ** 2).sum(-1))
    radii = np.unique(gaps[gaps > 0.0])
    if radii.size == 0:
        return 0.0
    radii = np.unique(np.concatenate([radii, 0.5 * radii]))
    # deterministic caps keep big inputs affordable without breaking the
    # monotone-in-samples guarantee
    if len(radii) > 64:
        pick = np.unique(np.linspace(0, len(radii) - 1, 64).round().astype(int))
        radii = radii[pick]
    if len(centers) > 256:
        centers = centers[::int(math.ceil(len(centers) / 256.0))]
    best = 0.0
    for c in centers:
        best = max(best, _best_ratio_at(curve, c, radii))
    rng = random.Random(0x5F3759DF)
    lo_x, lo_y, hi_x, hi_y = curve.bbox()
    diam = max(math.hypot(hi_x - lo_x, hi_y - lo_y), 1e-12)
    for _ in range(samples):
        c = curve.point_at_param(rng.random())
        r = rng.uniform(1e-3, 1.0) * diam
        best = max(best, _best_ratio_at(curve, c, [r]))
    return best


# ---------------------------------------------------------------------------
# the non-empty-cell sweep
# ---------------------------------------------------------------------------

def _jitter(x: float, salt: int) -> float:
    """Deterministic hash offset, at most eta/100 in magnitude."""
    h = hash((round(float(x), 9), salt))
    return ((h % 100003) / 100003.0 - 0.5) * get_eta() * 0.02


def nonempty_cells_sweep(target: PolygonalCurve, base: PolygonalCurve,
                         delta: float) -> CellSet:
    """Exactly the cells (i, j) whose free space at delta is non-empty.

    Sweep over x with events at base-edge endpoints and capsule arc/side
    breakpoints; base edges crossing a capsule boundary are found when the
    later of the pair activates, and a containment pass fills in the runs
    of edges that stay fully inside one capsule (a capsule never touched
    by the base curve falls back to a start-vertex check).  Event order is
    decided on deterministically jittered abscissas; every candidate is
    re-validated with the exact per-cell emptiness predicate, so jitter
    and inclusive slop can only cost work, never correctness.
    """
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    n1, n2 = target.n_edges, base.n_edges
    scale = bounding_scale(target, base)
    slop = get_eta() * max(scale, delta)
    margin = max(slop, get_eta())
    caps = [Capsule(target.edge_segment(i), delta) for i in range(n1)]

    heap: List[Tuple[float, int, int, str, int, int]] = []
    seq = 0

    def push(x: float, rank: int, kind: str, a: int, b: int = -1) -> None:
        nonlocal seq
        heapq.heappush(heap, (x + _jitter(x, rank * 7919 + a), rank, seq,
                              kind, a, b))
        seq += 1

    for i, cap in enumerate(caps):
        bps = cap.breakpoints()
        push(bps[0] - margin, 0, "cap_in", i)
        for x in bps[1:-1]:
            push(x, 1, "cap_break", i)
        push(bps[-1] + margin, 3, "cap_out", i)
    for j in range(n2):
        e = base.edge_segment(j)
        x0, x1 = sorted((e[0][0], e[1][0]))
        push(x0 - margin, 0, "edge_in", j)
        push(x1 + margin, 3, "edge_out", j)

    act_caps: Dict[int, Tuple[float, float]] = {}
    act_edges: Dict[int, Tuple[float, float]] = {}
    crossers: Dict[int, Set[int]] = {}
    crossings: Set[Tuple[int, int]] = set()

    def overlap(p: Tuple[float, float], q: Tuple[float, float]) -> bool:
        return p[0] <= q[1] + margin and q[0] <= p[1] + margin

    def classify(i: int, j: int, at_x: float) -> None:
        s = caps[i].segment
        e = base.edge_segment(j)
        dmin = segment_segment_distance(s[0], s[1], e[0], e[1])
        if dmin > delta + slop:
            return
        dmax = max(point_segment_distance(e[0], s[0], s[1]),
                   point_segment_distance(e[1], s[0], s[1]))
        if dmax >= delta - slop:
            # the edge pierces the capsule boundary
            crossers.setdefault(i, set()).add(j)
            push(at_x, 2, "cross", i, j)
        # an edge strictly inside is left for the containment pass

    while heap:
        x, rank, _, kind, a, b = heapq.heappop(heap)
        if kind == "cap_in":
            act_caps[a] = caps[a].y_range()
            for j, yr in act_edges.items():
                if overlap(act_caps[a], yr):
                    classify(a, j, x)
        elif kind == "edge_in":
            e = base.edge_segment(a)
            act_edges[a] = (min(e[0][1], e[1][1]), max(e[0][1], e[1][1]))
            for i, yr in act_caps.items():
                if overlap(yr, act_edges[a]):
                    classify(i, a, x)
        elif kind == "cap_out":
            act_caps.pop(a, None)
        elif kind == "edge_out":
            act_edges.pop(a, None)
        elif kind == "cross":
            crossings.add((a, b))
        # cap_break events only refine the ordering; the active capsule
        # keeps its full extent

    candidates: Set[Tuple[int, int]] = set(crossings)
    start_v = base.vertex(0)
    for i, cap in enumerate(caps):
        crs = sorted(crossers.get(i, ()))
        if not crs:
            # the base curve never meets this boundary: all inside or all
            # outside, and the start vertex decides which
            if cap.contains(start_v, slop):
                candidates.update((i, j) for j in range(n2))
            continue
        bounds = [-1] + crs + [n2]
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi - lo <= 1:
                continue
            # a crosser-free run is entirely in or entirely out; probe one
            mid = base.edge_point(lo + 1, 0.5)
            if cap.contains(mid, slop):
                candidates.update((i, j) for j in range(lo + 1, hi))

    pad = get_eta() * scale
    return CellSet((i, j) for (i, j) in candidates
                   if not cell_free_space(target, base, i, j, delta,
                                          pad).is_empty())


# ---------------------------------------------------------------------------
# the c-packed decider wrapper
# ---------------------------------------------------------------------------

def decide_apx_cpacked_report(target: PolygonalCurve, base: PolygonalCurve,
                              k: int, delta: float, eps: float) -> ApxReport:
    """Report form of decide_apx_cpacked."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if not (0.0 < eps <= 1.0):
        raise ValueError("eps must lie in (0, 1]")
    eps_p = eps / 20.0
    delta_p = delta / (1.0 - 2.0 * eps_p)
    mu = eps_p * delta_p
    # deciding the simplified pair at delta_p with ratio 3(1+eps_p)^2
    # leaves enough room for the 2*mu simplification slack on both sides
    t_s = simplify(target, mu)
    b_s = simplify(base, mu)
    cells = nonempty_cells_sweep(t_s, b_s, delta_p)
    state = ApxState(t_s, b_s, delta_p, eps_p, cells=cells.pairs)
    rep = _decide_with_state(state, k)
    stats = dict(rep.stats)
    stats.update(mu=mu, delta_scan=delta_p, nonempty_cells=len(cells),
                 simplified_sizes=(t_s.n_edges, b_s.n_edges))
    return ApxReport(rep.verdict, rep.shortcuts_used, stats)


def decide_apx_cpacked(target: PolygonalCurve, base: PolygonalCurve, k: int,
                       delta: float, eps: float) -> str:
    """One-sided c-packed decision, same verdict contract as decide_apx.

    GREATER_THAN_DELTA is trustworthy at delta and AT_MOST certifies
    (3+eps)*delta; the simplification slack is already folded in.
    """
    return decide_apx_cpacked_report(target, base, k, delta, eps).verdict
