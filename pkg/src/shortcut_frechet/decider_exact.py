"""Exact decision of the k-shortcut Frechet distance.

Round s of the computation holds the parameter-space points reachable by
monotone paths that use exactly s proper tunnels.  Within a round,
reachability spreads through shared cell walls exactly like the classical
free-space sweep.  Between rounds it jumps: vertical tunnels stay in one
target column and are always affordable once both endpoints are free,
while diagonal tunnels are priced by an ordered-disk stabbing wedge.
"""

from __future__ import annotations

import time
from typing import Dict, List, NamedTuple, Optional, Tuple

from .freespace import (
    BoundaryInterval,
    FreeCell,
    ReachGenerator,
    cell_free_space,
    outgoing_intervals,
    project_to_base_edge,
    prune_generators,
    reach_membership,
    reach_witness,
)
from .geometry import (
    CurveLocation,
    PolygonalCurve,
    apply_shortcuts,
    bounding_scale,
    curve_frechet_decide,
    dist,
    point_at,
    segment_to_curve_frechet_decide,
    subcurve,
)
from .decider_apx import vertical_tunnel
from .stabbing import Disk, wedge_build, wedge_intersect_edges
from .tolerances import get_eta

_NEG_INF = float("-inf")


# ---------------------------------------------------------------------------
# witness provenance tags (geometry never looks at these)
# ---------------------------------------------------------------------------

class _Init(NamedTuple):
    pass


class _FromLeft(NamedTuple):
    y1: float
    y2: float


class _FromBottom(NamedTuple):
    x1: float
    x2: float


class _Vertical(NamedTuple):
    src_b: int
    x_p: float
    y_p: float


class _Diagonal(NamedTuple):
    a: int
    b: int
    y1: float
    y2: float
    wedge: object


class Tunnel(NamedTuple):
    """One proper tunnel of a witness, in curve locations."""
    t_from: CurveLocation
    t_to: CurveLocation
    b_from: CurveLocation
    b_to: CurveLocation


class ExactDecision(NamedTuple):
    reachable: bool
    shortcuts_used: Optional[int]
    tunnels: Optional[List[Tunnel]]
    stats: dict

    def __bool__(self) -> bool:
        return self.reachable


class _GPoint(NamedTuple):
    """Point in grid units: edge index + local parameter on each axis."""
    x: float
    y: float


def _min_pt(p: Optional[_GPoint], q: Optional[_GPoint]) -> Optional[_GPoint]:
    if p is None:
        return q
    if q is None:
        return p
    return p if (p.x, p.y) <= (q.x, q.y) else q


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------

class ExactState:
    """Per-round reachable sets, outgoing wall intervals, and trackers."""

    def __init__(self, target: PolygonalCurve, base: PolygonalCurve,
                 delta: float):
        self.T = target
        self.B = base
        self.delta = float(delta)
        self.n1 = target.n_edges
        self.n2 = base.n_edges
        self.pad = get_eta() * bounding_scale(target, base)
        self._cells: Dict[Tuple[int, int], FreeCell] = {}
        # one entry per completed round:
        self.rounds: List[Dict[Tuple[int, int], List[ReachGenerator]]] = []
        self.right_out: List[Dict[Tuple[int, int], BoundaryInterval]] = []
        self.top_out: List[Dict[Tuple[int, int], BoundaryInterval]] = []
        # col_left[s][(i, j)] = leftmost point of column i over rows <= j
        self.col_left: List[Dict[Tuple[int, int], Optional[_GPoint]]] = []
        self._dfrags: Dict[int, Dict[Tuple[int, int], List[ReachGenerator]]] = {}
        self._diag_memo: Dict[tuple, list] = {}

    def cell(self, i: int, j: int) -> FreeCell:
        key = (i, j)
        got = self._cells.get(key)
        if got is None:
            got = cell_free_space(self.T, self.B, i, j, self.delta, self.pad)
            self._cells[key] = got
        return got

    # -- the three per-cell steps ---------------------------------------

    def step_neighbors(self, s: int, i: int, j: int) -> List[ReachGenerator]:
        """Reachability through the left and bottom walls, same round."""
        out: List[ReachGenerator] = []
        if i > 0:
            iv = self.right_out[s].get((i - 1, j))
            if iv is not None and not iv.is_empty:
                out.append(ReachGenerator(iv.lo, 1.0, 0.0,
                                          _FromLeft(iv.lo, iv.hi)))
        if j > 0:
            iv = self.top_out[s].get((i, j - 1))
            if iv is not None and not iv.is_empty:
                out.append(ReachGenerator(0.0, 1.0, iv.lo,
                                          _FromBottom(iv.lo, iv.hi)))
        return out

    def step_vertical(self, s: int, i: int, j: int) -> List[ReachGenerator]:
        """One tunnel up the column from the previous round's leftmost."""
        if s < 1 or j < 1:
            return []
        p = self.col_left[s - 1].get((i, j - 1))
        if p is None:
            return []
        x_cap = p.x - i
        src_b = int(p.y) if p.y < self.n2 else self.n2 - 1
        return vertical_tunnel(p, (i, j), self.delta,
                               tag=_Vertical(src_b, x_cap, p.y - src_b))

    def step_diagonal(self, s: int, i: int, j: int) -> List[ReachGenerator]:
        """Tunnels from earlier columns and rows of the previous round."""
        if s < 1:
            return []
        return self._diagonal_fragments(s).get((i, j), [])

    # -- diagonal tunnels, organised by source --------------------------

    def _diagonal_fragments(self, s: int
                            ) -> Dict[Tuple[int, int], List[ReachGenerator]]:
        got = self._dfrags.get(s)
        if got is not None:
            return got
        out: Dict[Tuple[int, int], List[ReachGenerator]] = {}
        prev = self.rounds[s - 1]
        for (a, b) in sorted(prev):
            gens = prev[(a, b)]
            if not gens:
                continue
            ivs = project_to_base_edge(self.cell(a, b), gens)
            # sources tend to stabilise from round to round, and a source
            # with the same launch intervals spawns the same fragments
            memo_key = (a, b, tuple(ivs))
            cached = self._diag_memo.get(memo_key)
            if cached is None:
                cached = []
                for (y1, y2) in ivs:
                    p1 = self.B.edge_point(b, y1)
                    p2 = self.B.edge_point(b, y2)
                    live = list(range(b + 1, self.n2))
                    disks: List[Disk] = []
                    for i in range(a + 1, self.n1):
                        disks.append(Disk(self.T.vertex(i), self.delta))
                        w = wedge_build((p1, p2), disks)
                        tag = _Diagonal(a, b, y1, y2, w)
                        per_edge = wedge_intersect_edges(
                            w, [(self.B.edge_segment(j)[0],
                                 self.B.edge_segment(j)[1]) for j in live])
                        # the wedge only shrinks as more disks pile up:
                        # an edge it misses now stays missed, and a column
                        # that misses every remaining base edge ends this
                        # source for good
                        next_live: List[int] = []
                        for j, uivs in zip(live, per_edge):
                            if not uivs:
                                continue
                            next_live.append(j)
                            if self.cell(i, j).is_empty():
                                continue
                            for (u1, u2) in uivs:
                                cached.append(
                                    ((i, j), ReachGenerator(u1, u2,
                                                            _NEG_INF, tag)))
                        live = next_live
                        if not live:
                            break
                self._diag_memo[memo_key] = cached
            for dest, gen in cached:
                out.setdefault(dest, []).append(gen)
        self._dfrags[s] = out
        return out

    # -- one full round --------------------------------------------------

    def run_round(self, s: int) -> None:
        assert s == len(self.rounds)
        table: Dict[Tuple[int, int], List[ReachGenerator]] = {}
        right_o: Dict[Tuple[int, int], BoundaryInterval] = {}
        top_o: Dict[Tuple[int, int], BoundaryInterval] = {}
        colh: Dict[Tuple[int, int], Optional[_GPoint]] = {}
        self.rounds.append(table)
        self.right_out.append(right_o)
        self.top_out.append(top_o)
        self.col_left.append(colh)
        for j in range(self.n2):
            for i in range(self.n1):
                cell = self.cell(i, j)
                gens: List[ReachGenerator] = []
                if not cell.is_empty():
                    gens.extend(self.step_neighbors(s, i, j))
                    if s == 0 and i == 0 and j == 0 and cell.contains(0.0, 0.0):
                        gens.append(ReachGenerator(0.0, 1.0, 0.0, _Init()))
                    gens.extend(self.step_diagonal(s, i, j))
                    gens.extend(self.step_vertical(s, i, j))
                    gens = prune_generators(gens)
                if gens:
                    table[(i, j)] = gens
                    r, t = outgoing_intervals(cell, gens)
                    if not r.is_empty:
                        right_o[(i, j)] = r
                    if not t.is_empty:
                        top_o[(i, j)] = t
                mine: Optional[_GPoint] = None
                for g in gens:
                    lm = cell.leftmost_in(g.y_lo, g.y_hi, g.x_cap)
                    if lm is not None:
                        mine = _min_pt(mine, _GPoint(i + lm[0], j + lm[1]))
                prev_col = colh.get((i, j - 1)) if j > 0 else None
                best = _min_pt(prev_col, mine)
                if best is not None:
                    colh[(i, j)] = best

    def corner_reached(self, s: int) -> bool:
        key = (self.n1 - 1, self.n2 - 1)
        gens = self.rounds[s].get(key, [])
        if not gens:
            return False
        return reach_membership(self.cell(*key), gens, (1.0, 1.0))

    def round_empty(self, s: int) -> bool:
        return not any(self.rounds[s].values())

    def generator_count(self, s: int) -> int:
        return sum(len(v) for v in self.rounds[s].values())

    # -- witness recovery ------------------------------------------------

    def backtrace(self, s: int) -> List[Tunnel]:
        i, j = self.n1 - 1, self.n2 - 1
        q: Tuple[float, float] = (1.0, 1.0)
        tunnels: List[Tunnel] = []
        guard = 0
        while True:
            guard += 1
            if guard > 4 * (self.n1 + self.n2) * (len(self.rounds) + 1):
                raise RuntimeError("witness recovery did not terminate")
            gens = self.rounds[s].get((i, j), [])
            got = reach_witness(self.cell(i, j), gens, q)
            if got is None:
                raise RuntimeError(
                    f"witness recovery lost the path at cell ({i}, {j})")
            g, seed = got
            tag = g.tag
            if isinstance(tag, _Init):
                return list(reversed(tunnels))
            if isinstance(tag, _FromLeft):
                q = (1.0, min(q[1], tag.y2))
                i -= 1
                continue
            if isinstance(tag, _FromBottom):
                q = (max(tag.x1, min(q[0], tag.x2)), 1.0)
                j -= 1
                continue
            if isinstance(tag, _Vertical):
                b = tag.src_b
                tunnels.append(Tunnel(
                    t_from=CurveLocation(i, tag.x_p),
                    t_to=CurveLocation(i, q[0]),
                    b_from=CurveLocation(b, tag.y_p),
                    b_to=CurveLocation(j, q[1]),
                ))
                q = (tag.x_p, tag.y_p)
                j = b
                s -= 1
                continue
            if isinstance(tag, _Diagonal):
                x_t, y_t = seed
                t_pt = self.B.edge_point(j, y_t)
                v = tag.wedge.membership_witness(t_pt)
                if v is None:
                    v = 0.5
                y_p = tag.y1 + v * (tag.y2 - tag.y1)
                src_cell = self.cell(tag.a, tag.b)
                ext = src_cell.x_extent(y_p)
                x_p = ext[1] if ext is not None else 1.0
                tunnels.append(Tunnel(
                    t_from=CurveLocation(tag.a, x_p),
                    t_to=CurveLocation(i, x_t),
                    b_from=CurveLocation(tag.b, y_p),
                    b_to=CurveLocation(j, y_t),
                ))
                q = (x_p, y_p)
                i, j = tag.a, tag.b
                s -= 1
                continue
            raise RuntimeError(f"unknown generator tag {tag!r}")


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def decide_exact(target: PolygonalCurve, base: PolygonalCurve, k: int,
                 delta: float, want_witness: bool = True) -> ExactDecision:
    """Is the target within Frechet distance delta of a k-shortcut curve?

    Runs k+1 rounds, cells row by row, and reports the smallest number of
    tunnels at which the top-right corner of the diagram became reachable,
    together with a witness tunnel list suitable for certification.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if delta < 0.0:
        raise ValueError("delta must be non-negative")
    t0 = time.perf_counter()
    state = ExactState(target, base, delta)
    per_round: List[int] = []
    for s in range(k + 1):
        state.run_round(s)
        per_round.append(state.generator_count(s))
        if state.corner_reached(s):
            tunnels = state.backtrace(s) if want_witness else None
            return ExactDecision(True, s, tunnels, _stats(state, per_round, t0))
        if s > 0 and state.round_empty(s):
            break
    return ExactDecision(False, None, None, _stats(state, per_round, t0))


def decide_shortcut_unbounded(target: PolygonalCurve, base: PolygonalCurve,
                              delta: float,
                              want_witness: bool = True) -> ExactDecision:
    """Decision with an unlimited shortcut budget.

    A witness never needs more proper tunnels than the base curve has
    edges, so this is the bounded decision at that k.
    """
    return decide_exact(target, base, base.n_edges, delta,
                        want_witness=want_witness)


def _stats(state: ExactState, per_round: List[int], t0: float) -> dict:
    return {
        "rounds_run": len(per_round),
        "generators_per_round": per_round,
        "generators_total": sum(per_round),
        "cells": state.n1 * state.n2,
        "seconds": time.perf_counter() - t0,
    }


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

def certify_witness(target: PolygonalCurve, base: PolygonalCurve,
                    delta: float, tunnels: List[Tunnel],
                    slack_mult: float = 10.0) -> bool:
    """Re-verify a positive answer from its witness.

    Checks every tunnel's price with the per-segment predicate, checks
    ordering and properness, then replays the whole shortcut curve
    against the target.  All comparisons get slack_mult * eta * scale of
    room, since the decider itself only promises that much.
    """
    slack = slack_mult * get_eta() * bounding_scale(target, base)
    prev_t = 0.0
    prev_b = 0.0
    pairs = []
    for tn in tunnels:
        tf = target.loc_units(tn.t_from)
        tt = target.loc_units(tn.t_to)
        bf = base.loc_units(tn.b_from)
        bt = base.loc_units(tn.b_to)
        if tf < prev_t - 1e-9 or bf < prev_b - 1e-9:
            return False
        if tt < tf - 1e-9 or bt <= bf:
            return False
        if tn.b_from[0] >= tn.b_to[0]:
            return False              # tunnels must change base edge
        seg = (point_at(base, tn.b_from), point_at(base, tn.b_to))
        piece = subcurve(target, tn.t_from, tn.t_to)
        if not segment_to_curve_frechet_decide(seg, piece, delta, slack=slack):
            return False
        pairs.append((tn.b_from, tn.b_to))
        prev_t, prev_b = tt, bt
    shortcut = apply_shortcuts(base, pairs)
    return curve_frechet_decide(target, shortcut, delta + slack)


def shortcut_frechet_value(target: PolygonalCurve, base: PolygonalCurve,
                           k: int, tol: float = 1e-6) -> float:
    """The k-shortcut Frechet distance to within tol, by bisection.

    The upper bracket is the largest vertex-to-vertex distance between
    the two curves, which bounds any matching by convexity.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if decide_exact(target, base, k, 0.0, want_witness=False).reachable:
        return 0.0
    hi = max(dist(tv, bv)
             for tv in target.vertices() for bv in base.vertices())
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if decide_exact(target, base, k, mid, want_witness=False).reachable:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
