"""Hard-instance generator for the shortcut Frechet decision problem.

Reduces a pick-one-per-table sum question (choose one value from each of
k tables so the choices add up to a goal) to a pair of curves whose
(4k+2)-shortcut Frechet distance is at most 1 exactly when the tables
can be solved.  The target curve runs along the x axis with small
zig-zag twists at a handful of focal abscissas.  The base curve hangs
one bundle of mirror edges inside the unit corridor of the target per
table and strings them together with connector material routed outside
the corridor.  Any matching within distance 1 is forced to tunnel
straight through the focal points, and the abscissa where each tunnel
lands encodes a running partial sum; the final twist closes only when
that sum hits the goal.

Shipped here: the table-sum types and a brute-force solver, the curve
pair builder, a witness-curve builder for a given selection, and an
invariant checker that re-verifies the geometry of a built instance.
"""
from __future__ import annotations

import itertools
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .geometry import (
    Point2,
    PolygonalCurve,
    point_segment_distance,
)

SOLVER_BUDGET = 10 ** 7
COORD_LIMIT = float(2 ** 40)
BUFFER_HALF_HEIGHT = 1.5
MIN_EDGE_GAP = 4.0

_EPS_DEFAULT = 2.5


class ConstructionError(ValueError):
    """Raised when a parameter combination breaks a build invariant."""


# ---------------------------------------------------------------------------
# table-sum instances
# ---------------------------------------------------------------------------


class KTableSumInstance(NamedTuple):
    """One value per table must be picked so the sum equals the goal.

    Stored in normalized form: each table sorted ascending with smallest
    entry zero, the goal shifted accordingly.  A negative goal after
    normalization simply means the instance is unsolvable.
    """

    tables: Tuple[Tuple[int, ...], ...]
    sigma: int

    @classmethod
    def from_raw(cls, tables: Sequence[Sequence[int]], sigma: int
                 ) -> "KTableSumInstance":
        """Normalize raw non-negative tables and a non-negative goal."""
        if sigma < 0:
            raise ValueError("goal must be non-negative")
        norm: List[Tuple[int, ...]] = []
        shift = 0
        for t in tables:
            vals = sorted(int(v) for v in t)
            if not vals:
                raise ValueError("tables must be non-empty")
            if vals[0] < 0:
                raise ValueError("table values must be non-negative")
            shift += vals[0]
            norm.append(tuple(v - vals[0] for v in vals))
        return cls(tuple(norm), int(sigma) - shift)

    def validate(self) -> None:
        for t in self.tables:
            if not t:
                raise ValueError("tables must be non-empty")
            if any(v != int(v) or v < 0 for v in t):
                raise ValueError("table values must be non-negative integers")
            if list(t) != sorted(t) or t[0] != 0:
                raise ValueError(
                    "tables must be sorted ascending and start at zero; "
                    "use from_raw to normalize")

    @property
    def k(self) -> int:
        return len(self.tables)

    def max_sum(self) -> int:
        return sum(t[-1] for t in self.tables)

    def choice_count(self) -> int:
        return math.prod(len(t) for t in self.tables)


def solve_ktablesum_bruteforce(instance: KTableSumInstance
                               ) -> Optional[Tuple[int, ...]]:
    """First selection (lexicographic, as indices) that hits the goal.

    Returns None when no selection works.  Refuses instances with more
    than SOLVER_BUDGET candidate selections.
    """
    instance.validate()
    if instance.choice_count() > SOLVER_BUDGET:
        raise ValueError("instance exceeds the brute-force budget of %d "
                         "selections" % SOLVER_BUDGET)
    for pick in itertools.product(*(range(len(t)) for t in instance.tables)):
        total = sum(t[i] for t, i in zip(instance.tables, pick))
        if total == instance.sigma:
            return tuple(pick)
    return None


# ---------------------------------------------------------------------------
# parameters and index records
# ---------------------------------------------------------------------------


class HardnessParams(NamedTuple):
    """Derived numeric layout of one built instance.

    lambdas has k+2 entries: entry i is the length of gadget i's entry
    edge, with the last entry repeating the terminal one.  focals holds
    the four tunnel abscissas of each encoding gadget.  sigma_encoded
    equals sigma whenever the goal is attainable in principle; an
    out-of-range goal is encoded as the unreachable value max_sum + 1,
    which leaves solvability unchanged while keeping the terminal
    geometry sane.
    """

    k: int
    eps_gadget: float
    gamma: float
    beta: float
    lambdas: Tuple[float, ...]
    deltas: Tuple[float, ...]
    delta_primes: Tuple[float, ...]
    focals: Tuple[Tuple[float, float, float, float], ...]
    f_init: float
    f_term: float
    t_end: float
    sigma: int
    sigma_encoded: int

    def all_focals(self) -> Tuple[float, ...]:
        flat: List[float] = [self.f_init]
        for quad in self.focals:
            flat.extend(quad)
        flat.append(self.f_term)
        return tuple(flat)


class BufferRect(NamedTuple):
    label: str
    focal_x: float
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float


class MirrorEdge(NamedTuple):
    """One mirror edge of the base curve, by position in the traversal."""

    name: str
    gadget: int
    family: str
    slot: int
    edge_index: int
    enter: Point2
    exit: Point2


class GadgetIndex(NamedTuple):
    base_vertex_labels: Tuple[str, ...]
    base_edge_kinds: Tuple[str, ...]
    base_edge_families: Tuple[str, ...]
    base_edge_aligned: Tuple[Optional[float], ...]
    target_vertex_labels: Tuple[str, ...]
    mirrors: Tuple[MirrorEdge, ...]
    buffers: Tuple[BufferRect, ...]


class HardnessInstance(NamedTuple):
    target: PolygonalCurve
    base: PolygonalCurve
    shortcut_budget: int
    threshold: float
    params: HardnessParams
    table_instance: KTableSumInstance
    index: GadgetIndex


class _GadgetGeom(NamedTuple):
    index: int
    table: Tuple[int, ...]
    m: int
    lam_in: float
    delta: float
    delta_prime: float
    p1: float
    p2: float
    p3: float
    p4: float
    alphas: Tuple[float, ...]
    alpha_primes: Tuple[float, ...]
    uppers: Tuple[Tuple[Point2, Point2], ...]   # (enter c_j, exit d_j)
    lowers: Tuple[Tuple[Point2, Point2], ...]   # (enter c'_j, exit d'_j)
    merge: Tuple[Point2, Point2]
    exit: Tuple[Point2, Point2]


def _porch_reach(k: int) -> float:
    # Long enough that no 4-unit walker crosses a porch, short enough
    # that porch-induced landing offsets stay clear of every carry
    # residue window.
    return 16.0 * k + 22.0


def _gadget_frame(idx: int, table: Tuple[int, ...], prev_far_x: float,
                  lam_in: float, eps: float, gamma: float, beta: float
                  ) -> _GadgetGeom:
    n = len(table)
    m = table[-1]
    delta_prime = lam_in + eps
    delta = max(2.0 * eps + 1.0, (n - 1) * (lam_in + beta) - delta_prime)
    p1 = prev_far_x + delta
    p2 = p1 + delta + delta_prime
    p3 = p2 + delta + delta_prime + gamma * m
    p4 = p3 + delta + delta_prime + gamma * m

    alphas: List[float] = []
    alpha_primes: List[float] = []
    uppers: List[Tuple[Point2, Point2]] = []
    lowers: List[Tuple[Point2, Point2]] = []
    for j in range(1, n + 1):
        a_j = delta + delta_prime + (j - 1) * (lam_in + beta)
        alpha = (delta + delta_prime) / a_j
        r_j = eps + (j - 1) * (lam_in + beta)
        s_j = table[j - 1]
        alpha_p = (delta + delta_prime + gamma * m) / (a_j + gamma * (m - s_j))
        alphas.append(alpha)
        alpha_primes.append(alpha_p)
        uppers.append((Point2(p1 + alpha * (delta + lam_in), alpha),
                       Point2(p1 + alpha * delta, alpha)))
        lowers.append((Point2(p2 + alpha_p * (lam_in + r_j), -alpha_p),
                       Point2(p2 + alpha_p * r_j, -alpha_p)))
    merge = (Point2(p4 - eps, 1.0), Point2(p3 + delta, 1.0))
    lam_out = lam_in + gamma * m
    exit_edge = (Point2(p4 + eps + lam_out, -1.0), Point2(p4 + eps, -1.0))
    return _GadgetGeom(idx, table, m, lam_in, delta, delta_prime,
                       p1, p2, p3, p4, tuple(alphas), tuple(alpha_primes),
                       tuple(uppers), tuple(lowers), merge, exit_edge)


# ---------------------------------------------------------------------------
# base-curve assembly
# ---------------------------------------------------------------------------


class _BaseBuilder:
    """Records base vertices plus per-edge bookkeeping while routing."""

    def __init__(self, strips: Sequence[Tuple[float, float]]):
        self.xs: List[float] = []
        self.ys: List[float] = []
        self.vlabels: List[str] = []
        self.ekinds: List[str] = []
        self.efams: List[str] = []
        self.ealigned: List[Optional[float]] = []
        self.strips = list(strips)
        self._runs = 0
        self._cols_left = 0
        self._cols_right = 0

    def start(self, x: float, y: float, label: str) -> None:
        self.xs.append(x)
        self.ys.append(y)
        self.vlabels.append(label)

    def add(self, x: float, y: float, vlabel: str, kind: str,
            family: str = "", aligned: Optional[float] = None) -> None:
        px, py = self.xs[-1], self.ys[-1]
        if abs(px - x) < 1e-12 and abs(py - y) < 1e-12:
            return
        self.xs.append(x)
        self.ys.append(y)
        self.vlabels.append(vlabel)
        self.ekinds.append(kind)
        self.efams.append(family)
        self.ealigned.append(aligned)

    @property
    def here(self) -> Point2:
        return Point2(self.xs[-1], self.ys[-1])

    def lane(self, sign: float) -> float:
        y = sign * (1.6 + 0.08 * self._runs)
        self._runs += 1
        return y

    def col_left(self) -> float:
        x = -(30.0 + 0.8 * self._cols_left)
        self._cols_left += 1
        return x

    def col_right(self, t_end: float) -> float:
        x = t_end + 30.0 + 0.8 * self._cols_right
        self._cols_right += 1
        return x

    def window_clear(self, lo: float, hi: float) -> bool:
        for a, b in self.strips:
            if not (hi <= a + 1e-9 or lo >= b - 1e-9):
                return False
        return True

    def assert_clear(self, lo: float, hi: float, what: str) -> None:
        if not self.window_clear(lo, hi):
            raise ConstructionError(
                "%s would cross a buffer rectangle (x window %.6g..%.6g)"
                % (what, lo, hi))

    def slant_anchor(self, qx: float, lane_y: float,
                     prefer_right: bool) -> float:
        """x of a lane anchor whose slant to (qx, +-1) dodges all strips."""
        span = abs(lane_y) - 1.0
        sides = (1.0, -1.0) if prefer_right else (-1.0, 1.0)
        for w in (4.0, 6.0, 8.0, 10.0, 12.0, 16.0, 24.0):
            for s in sides:
                x2 = qx + s * w * (0.5 / span)
                if self.window_clear(min(qx, x2), max(qx, x2)):
                    return qx + s * w
        raise ConstructionError("no clear slant anchor near x=%.6g" % qx)


def _depart_boundary(bld: _BaseBuilder, seg: str, fam: str,
                     prefer_right: bool) -> float:
    """Slant from the current band boundary point up to a fresh lane."""
    q = bld.here
    sign = 1.0 if q.y > 0 else -1.0
    lane_y = bld.lane(sign)
    ax = bld.slant_anchor(q.x, lane_y, prefer_right)
    bld.add(ax, lane_y, seg + ":connector", "route", fam)
    return lane_y


def _arrive_boundary(bld: _BaseBuilder, q: Point2, lane_y: float,
                     prefer_right: bool, seg: str, mlabel: str,
                     fam: str) -> None:
    """Lane run to an anchor, then slant down onto a band boundary point."""
    ax = bld.slant_anchor(q.x, lane_y, prefer_right)
    bld.add(ax, lane_y, seg + ":connector", "route")
    bld.add(q.x, q.y, mlabel, "route", fam)


def _lower_descent(bld: _BaseBuilder, pe: Point2, focal_x: float
                   ) -> Tuple[List[Point2], float]:
    """Continue a focal-aligned descent from a lower porch end.

    Follows the ray through focal_x downward from pe.  When a buffer
    strip lies on the ray above depth 1 the descent stops half a unit
    right of that strip and drops vertically through the band there;
    otherwise it kinks 8 units past depth 1.  Returns the intermediate
    points, top down, and the x of the final vertical.
    """
    rate = (focal_x - pe.x) / (-pe.y)
    if rate <= 16.0:
        raise ConstructionError("lower connector descent is too steep")
    s0 = -pe.y
    stop_depth: Optional[float] = None
    stop_x = 0.0
    for a, b in bld.strips:
        s_enter = (focal_x - b) / rate
        s_leave = (focal_x - a) / rate
        if s_leave <= s0 or s_enter >= 1.0:
            continue
        if stop_depth is None or s_enter - 0.5 / rate < stop_depth:
            stop_depth = s_enter - 0.5 / rate
            stop_x = b + 0.5
    if stop_depth is not None:
        if stop_depth <= s0 + 1e-9:
            raise ConstructionError(
                "buffer rectangle blocks a lower connector at its porch")
        bld.assert_clear(stop_x, stop_x, "lower connector drop")
        return [Point2(stop_x, -stop_depth)], stop_x
    x1 = focal_x - rate
    xk = x1 - 8.0
    depth = 1.0 + 8.0 / rate
    bld.assert_clear(min(xk, pe.x), max(xk, pe.x), "lower connector descent")
    return [Point2(xk, -depth)], xk


def _emit_upper_in(bld: _BaseBuilder, g: _GadgetGeom, j: int, p0: float,
                   lane_y: float, seg: str) -> None:
    """Connector from a top lane down to the enter end of e_j (j >= 2)."""
    alpha = g.alphas[j - 1]
    cj = g.uppers[j - 1][0]
    fam = "upper:%d:in" % j
    pe = Point2(cj.x + p0 * alpha, alpha)
    rate = (g.p2 - pe.x) / alpha
    if rate <= 16.0:
        raise ConstructionError("upper connector descent is too steep")
    xk = g.p2 - rate - 8.0
    h = 1.0 + 8.0 / rate
    bld.assert_clear(min(xk, pe.x), max(xk, pe.x), "upper connector descent")
    bld.add(xk, lane_y, seg + ":connector", "route")
    bld.add(xk, h, seg + ":connector", "connector", fam)
    bld.add(pe.x, pe.y, seg + ":connector", "connector", fam, aligned=g.p2)
    bld.add(cj.x, cj.y, seg + ":mirror:upper:%d" % j, "connector", fam)


def _emit_upper_out(bld: _BaseBuilder, g: _GadgetGeom, j: int, p0: float,
                    seg: str) -> float:
    """Connector from the exit end of e_j (j >= 2) up to a fresh lane."""
    alpha = g.alphas[j - 1]
    dj = g.uppers[j - 1][1]
    fam = "upper:%d:out" % j
    pe = Point2(dj.x - p0 * alpha, alpha)
    bld.assert_clear(pe.x, pe.x, "upper connector rise")
    bld.add(pe.x, pe.y, seg + ":connector", "connector", fam)
    bld.add(pe.x, BUFFER_HALF_HEIGHT, seg + ":connector", "connector", fam)
    lane_y = bld.lane(1.0)
    bld.add(pe.x, lane_y, seg + ":connector", "route")
    return lane_y


def _emit_lower_in(bld: _BaseBuilder, g: _GadgetGeom, j: int, p0: float,
                   lane_y: float, seg: str) -> None:
    """Connector from a bottom lane up to the enter end of e'_j (j >= 2)."""
    alpha_p = g.alpha_primes[j - 1]
    cpj = g.lowers[j - 1][0]
    fam = "lower:%d:in" % j
    pe = Point2(cpj.x + p0 * alpha_p, -alpha_p)
    mids, drop_x = _lower_descent(bld, pe, g.p3)
    bld.add(drop_x, lane_y, seg + ":connector", "route")
    bld.add(drop_x, -BUFFER_HALF_HEIGHT, seg + ":connector", "route")
    for pt in reversed(mids):
        bld.add(pt.x, pt.y, seg + ":connector", "connector", fam)
    bld.add(pe.x, pe.y, seg + ":connector", "connector", fam, aligned=g.p3)
    bld.add(cpj.x, cpj.y, seg + ":mirror:lower:%d" % j, "connector", fam)


def _emit_lower_out(bld: _BaseBuilder, g: _GadgetGeom, j: int, p0: float,
                    seg: str) -> float:
    """Connector from the exit end of e'_j (j >= 2) down to a fresh lane."""
    alpha_p = g.alpha_primes[j - 1]
    dpj = g.lowers[j - 1][1]
    fam = "lower:%d:out" % j
    pe = Point2(dpj.x - p0 * alpha_p, -alpha_p)
    bld.add(pe.x, pe.y, seg + ":connector", "connector", fam)
    first = True
    mids, drop_x = _lower_descent(bld, pe, g.p3)
    for pt in mids:
        bld.add(pt.x, pt.y, seg + ":connector", "connector", fam,
                aligned=g.p3 if first else None)
        first = False
    bld.add(drop_x, -BUFFER_HALF_HEIGHT, seg + ":connector", "connector", fam)
    lane_y = bld.lane(-1.0)
    bld.add(drop_x, lane_y, seg + ":connector", "route")
    return lane_y


# ---------------------------------------------------------------------------
# instance construction
# ---------------------------------------------------------------------------


def build_instance(table_instance: KTableSumInstance, *,
                   eps_gadget: Optional[float] = None,
                   gamma: Optional[float] = None,
                   beta: Optional[float] = None) -> HardnessInstance:
    """Build the curve pair encoding one table-sum instance.

    The shortcut budget is 4k+2 and the interesting threshold is 1: the
    target lies within shortcut Frechet distance 1 of the base exactly
    when the tables are solvable.  Keyword overrides replace the derived
    defaults; they are validated against the hard constraints only, so
    an intentionally bad override builds a layout that the invariant
    checker will flag rather than raising here.
    """
    table_instance.validate()
    k = table_instance.k
    eps = _EPS_DEFAULT if eps_gadget is None else float(eps_gadget)
    if not 2.0 < eps < 16.0:
        raise ConstructionError("eps_gadget must lie strictly between "
                                "2 and 16")
    gam = (48.0 * k + 64.0) if gamma is None else float(gamma)
    if gam < 16.0 * (k + 1) + 5.0:
        raise ConstructionError("gamma must be at least 16*(k+1)+5")

    lambdas: List[float] = [2.0 * gam]
    for t in table_instance.tables:
        lambdas.append(lambdas[-1] + gam * t[-1])
    lambdas.append(lambdas[-1])
    # Tooth spacing only matters through its residue on the gamma grid
    # (the ladder lengths are gamma multiples, so lam + bet falls at bet
    # mod gamma): an odd residue near 2*gamma/3 keeps single and double
    # tooth hops a third of a period away from every porch window.  The
    # extra whole period keeps the depth-encoded teeth inside the band
    # for spreads up to gamma per table.  Anything much larger would only
    # blow up the coordinates, and with them the decider's scaled
    # tolerance, without separating anything further.
    bet = (gam + 2.0 * math.floor(gam / 3.0) + 1.0 if beta is None
           else float(beta))
    if bet <= 0.0:
        raise ConstructionError("beta must be positive")

    sigma = table_instance.sigma
    sigma_max = table_instance.max_sum()
    sigma_enc = sigma if 0 <= sigma <= sigma_max else sigma_max + 1

    f_init = eps + gam
    init_exit = (Point2(3.0 * gam + 2.0 * eps, -1.0),
                 Point2(gam + 2.0 * eps, -1.0))
    frames: List[_GadgetGeom] = []
    prev_far = init_exit[0].x
    for i, t in enumerate(table_instance.tables, start=1):
        g = _gadget_frame(i, t, prev_far, lambdas[i - 1], eps, gam, bet)
        frames.append(g)
        prev_far = g.exit[0].x
    last_exit = frames[-1].exit if frames else init_exit
    f_term = last_exit[1].x + lambdas[k] + eps
    t_end = last_exit[1].x + 2.0 * lambdas[k] + 2.0 * eps \
        - gam * (sigma_enc + 1)

    focal_list: List[Tuple[str, float]] = [("init:f", f_init)]
    for g in frames:
        for name, fx in zip(("p1", "p2", "p3", "p4"),
                            (g.p1, g.p2, g.p3, g.p4)):
            focal_list.append(("g%d:%s" % (g.index, name), fx))
    focal_list.append(("terminal:f", f_term))
    for (la, xa), (lb, xb) in zip(focal_list, focal_list[1:]):
        if xb - xa < 2.0 + 1e-9:
            raise ConstructionError(
                "focal points %s and %s are closer than the twist width"
                % (la, lb))
    if t_end < f_term + eps - 1e-9:
        raise ConstructionError("terminal focal point crowds the endpoint")

    t_pts: List[Tuple[float, float]] = [(0.0, 0.0)]
    t_labels: List[str] = ["start"]
    for label, fx in focal_list:
        t_pts.extend([(fx - 1.0, 0.0), (fx + 1.0, 0.0), (fx - 1.0, 0.0)])
        t_labels.extend([label + ":twist"] * 3)
    t_pts.append((t_end, 0.0))
    t_labels.append("end")
    target = PolygonalCurve(t_pts, collapse=False)

    strips = [(fx - eps, fx + eps) for _, fx in focal_list]
    buffers = tuple(BufferRect(label, fx, fx - eps, fx + eps,
                               -BUFFER_HALF_HEIGHT, BUFFER_HALF_HEIGHT)
                    for label, fx in focal_list)

    p0 = _porch_reach(k)
    bld = _BaseBuilder(strips)
    mirror_marks: List[Tuple[str, int, str, int, int]] = []

    def mark_mirror(name: str, gadget: int, family: str, slot: int) -> None:
        mirror_marks.append((name, gadget, family, slot, len(bld.xs) - 1))

    # initialization: up and around the left, onto the starter edge
    bld.start(0.0, 1.0, "init:endpoint")
    lane_a = _depart_boundary(bld, "init", "start:out", True)
    col = bld.col_left()
    bld.add(col, lane_a, "init:connector", "route")
    lane_b = bld.lane(-1.0)
    bld.add(col, lane_b, "init:connector", "route")
    _arrive_boundary(bld, init_exit[0], lane_b, False, "init",
                     "init:mirror:exit", "exit:in")
    bld.add(init_exit[1].x, init_exit[1].y, "init:mirror:exit", "mirror")
    mark_mirror("g0:exit", 0, "exit", 0)

    for g in frames:
        seg = "g%d" % g.index
        n = len(g.table)
        # entry transition: previous exit edge to the top bundle
        lane_a = _depart_boundary(bld, seg, "entry:out", True)
        col = bld.col_left()
        bld.add(col, lane_a, seg + ":connector", "route")
        lane_b = bld.lane(1.0)
        bld.add(col, lane_b, seg + ":connector", "route")
        _arrive_boundary(bld, g.uppers[0][0], lane_b, False, seg,
                         seg + ":mirror:upper:1", "upper:1:in")
        bld.add(g.uppers[0][1].x, g.uppers[0][1].y,
                seg + ":mirror:upper:1", "mirror")
        mark_mirror(seg + ":upper:1", g.index, "upper", 1)
        for j in range(2, n + 1):
            if j == 2:
                lane_y = _depart_boundary(bld, seg, "upper:1:out", True)
            else:
                lane_y = _emit_upper_out(bld, g, j - 1, p0, seg)
            _emit_upper_in(bld, g, j, p0, lane_y, seg)
            bld.add(g.uppers[j - 1][1].x, g.uppers[j - 1][1].y,
                    seg + ":mirror:upper:%d" % j, "mirror")
            mark_mirror(seg + ":upper:%d" % j, g.index, "upper", j)
        # across to the bottom bundle, outermost edge first
        if n >= 2:
            lane_a = _emit_upper_out(bld, g, n, p0, seg)
        else:
            lane_a = _depart_boundary(bld, seg, "upper:1:out", True)
        col = bld.col_left()
        bld.add(col, lane_a, seg + ":connector", "route")
        lane_b = bld.lane(-1.0)
        bld.add(col, lane_b, seg + ":connector", "route")
        if n >= 2:
            _emit_lower_in(bld, g, n, p0, lane_b, seg)
        else:
            _arrive_boundary(bld, g.lowers[0][0], lane_b, True, seg,
                             seg + ":mirror:lower:1", "lower:1:in")
        bld.add(g.lowers[n - 1][1].x, g.lowers[n - 1][1].y,
                seg + ":mirror:lower:%d" % n, "mirror")
        mark_mirror(seg + ":lower:%d" % n, g.index, "lower", n)
        for j in range(n - 1, 0, -1):
            lane_y = _emit_lower_out(bld, g, j + 1, p0, seg)
            if j >= 2:
                _emit_lower_in(bld, g, j, p0, lane_y, seg)
            else:
                _arrive_boundary(bld, g.lowers[0][0], lane_y, True, seg,
                                 seg + ":mirror:lower:1", "lower:1:in")
            bld.add(g.lowers[j - 1][1].x, g.lowers[j - 1][1].y,
                    seg + ":mirror:lower:%d" % j, "mirror")
            mark_mirror(seg + ":lower:%d" % j, g.index, "lower", j)
        # merge edge
        lane_a = _depart_boundary(bld, seg, "lower:1:out", True)
        col = bld.col_left()
        bld.add(col, lane_a, seg + ":connector", "route")
        lane_b = bld.lane(1.0)
        bld.add(col, lane_b, seg + ":connector", "route")
        _arrive_boundary(bld, g.merge[0], lane_b, False, seg,
                         seg + ":mirror:merge", "merge:in")
        bld.add(g.merge[1].x, g.merge[1].y, seg + ":mirror:merge", "mirror")
        mark_mirror(seg + ":merge", g.index, "merge", 0)
        # exit edge
        lane_a = _depart_boundary(bld, seg, "merge:out", True)
        col = bld.col_left()
        bld.add(col, lane_a, seg + ":connector", "route")
        lane_b = bld.lane(-1.0)
        bld.add(col, lane_b, seg + ":connector", "route")
        _arrive_boundary(bld, g.exit[0], lane_b, False, seg,
                         seg + ":mirror:exit", "exit:in")
        bld.add(g.exit[1].x, g.exit[1].y, seg + ":mirror:exit", "mirror")
        mark_mirror(seg + ":exit", g.index, "exit", 0)

    # terminal: around the right end, back onto the endpoint above t_end
    lane_a = _depart_boundary(bld, "terminal", "exit:out", True)
    col = bld.col_right(t_end)
    bld.add(col, lane_a, "terminal:connector", "route")
    lane_b = bld.lane(1.0)
    bld.add(col, lane_b, "terminal:connector", "route")
    ax = bld.slant_anchor(t_end, lane_b, True)
    bld.add(ax, lane_b, "terminal:connector", "route")
    bld.add(t_end, 1.0, "terminal:endpoint", "route", "end:in")

    base = PolygonalCurve(list(zip(bld.xs, bld.ys)), collapse=False)
    if len(base.vertices()) != len(bld.xs):
        raise ConstructionError("base traversal produced a degenerate edge")

    worst = max(max(abs(v) for v in bld.xs),
                max(abs(x) for x, _ in t_pts))
    if worst > COORD_LIMIT:
        raise ConstructionError("layout exceeds the coordinate bound 2**40")

    mirrors = tuple(
        MirrorEdge(name, gadget, family, slot, vidx - 1,
                   Point2(bld.xs[vidx - 1], bld.ys[vidx - 1]),
                   Point2(bld.xs[vidx], bld.ys[vidx]))
        for name, gadget, family, slot, vidx in mirror_marks)
    index = GadgetIndex(tuple(bld.vlabels), tuple(bld.ekinds),
                        tuple(bld.efams), tuple(bld.ealigned),
                        tuple(t_labels), mirrors, buffers)
    params = HardnessParams(
        k, eps, gam, bet, tuple(lambdas),
        tuple(g.delta for g in frames),
        tuple(g.delta_prime for g in frames),
        tuple((g.p1, g.p2, g.p3, g.p4) for g in frames),
        f_init, f_term, t_end, sigma, sigma_enc)
    instance = HardnessInstance(target, base, 4 * k + 2, 1.0, params,
                                table_instance, index)
    if eps_gadget is None and gamma is None and beta is None:
        report = check_instance_invariants(instance)
        if not report.ok:
            raise ConstructionError(
                "default-parameter build failed its own invariant check: "
                + "; ".join(report.failures))
    return instance


# ---------------------------------------------------------------------------
# witness curves
# ---------------------------------------------------------------------------


class CertificateInfo(NamedTuple):
    curve: PolygonalCurve
    positions: Tuple[Point2, ...]
    labels: Tuple[str, ...]
    selection: Tuple[int, ...]
    exit_offsets: Tuple[float, ...]
    final_gap: float


def _through(q: Point2, focal_x: float, height: float) -> Point2:
    """Image of q under the central projection through (focal_x, 0)."""
    if q.y == 0.0:
        raise ValueError("projection source must be off the axis")
    x = q.x + (1.0 - height / q.y) * (focal_x - q.x)
    return Point2(x, height)


def _reframe(instance: HardnessInstance) -> List[_GadgetGeom]:
    p = instance.params
    frames: List[_GadgetGeom] = []
    prev_far = 3.0 * p.gamma + 2.0 * p.eps_gadget
    for i, t in enumerate(instance.table_instance.tables, start=1):
        g = _gadget_frame(i, t, prev_far, p.lambdas[i - 1],
                          p.eps_gadget, p.gamma, p.beta)
        frames.append(g)
        prev_far = g.exit[0].x
    return frames


def one_touch_certificate(instance: HardnessInstance,
                          selection: Sequence[int]) -> CertificateInfo:
    """The canonical witness polyline for one selection per table.

    Starts at the base start point, tunnels once through every focal
    point touching one mirror edge in between, and ends at the base
    endpoint.  For a selection that sums to the goal the polyline stays
    within Frechet distance 1 of the target; otherwise its last segment
    misses the terminal focal point and certification fails.
    """
    p = instance.params
    frames = _reframe(instance)
    if len(selection) != p.k:
        raise ValueError("selection must pick one entry per table")
    pts: List[Point2] = [Point2(0.0, 1.0)]
    labels: List[str] = ["start"]
    offsets: List[float] = []
    v = _through(pts[0], p.f_init, -1.0)
    pts.append(v)
    labels.append("init:exit")
    offsets.append(v.x - (p.gamma + 2.0 * p.eps_gadget))
    for g, pick in zip(frames, selection):
        if not 0 <= pick < len(g.table):
            raise ValueError("selection index out of range for table %d"
                             % g.index)
        v = _through(v, g.p1, g.alphas[pick])
        pts.append(v)
        labels.append("g%d:upper:%d" % (g.index, pick + 1))
        v = _through(v, g.p2, -g.alpha_primes[pick])
        pts.append(v)
        labels.append("g%d:lower:%d" % (g.index, pick + 1))
        v = _through(v, g.p3, 1.0)
        pts.append(v)
        labels.append("g%d:merge" % g.index)
        v = _through(v, g.p4, -1.0)
        pts.append(v)
        labels.append("g%d:exit" % g.index)
        offsets.append(v.x - g.exit[1].x)
    land = _through(v, p.f_term, 1.0)
    gap = abs(land.x - p.t_end)
    pts.append(Point2(p.t_end, 1.0))
    labels.append("end")
    curve = PolygonalCurve(pts, collapse=False)
    return CertificateInfo(curve, tuple(pts), tuple(labels),
                           tuple(int(i) for i in selection),
                           tuple(offsets), gap)


# ---------------------------------------------------------------------------
# invariant checking
# ---------------------------------------------------------------------------


class PatternHit(NamedTuple):
    focal: str
    launch: str
    landing_family: str
    landing_edge: int
    dead: bool
    reason: str


class InvariantReport(NamedTuple):
    bands_ok: bool
    separation_ok: bool
    buffers_ok: bool
    mirrors_in_corridor_ok: bool
    axis_crossings_outside_ok: bool
    pattern_hits_dead_ok: bool
    certificate_monotone_ok: Optional[bool]
    pattern_hits: Tuple[PatternHit, ...]
    failures: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        flags = [self.bands_ok, self.separation_ok, self.buffers_ok,
                 self.mirrors_in_corridor_ok, self.axis_crossings_outside_ok,
                 self.pattern_hits_dead_ok]
        if self.certificate_monotone_ok is not None:
            flags.append(self.certificate_monotone_ok)
        return all(flags)


def _dist_to_curve(q: Point2, curve: PolygonalCurve) -> float:
    verts = curve.vertices()
    return min(point_segment_distance(q, a, b)
               for a, b in zip(verts, verts[1:]))


def _clip_edge_to_band(a: Point2, b: Point2
                       ) -> Optional[Tuple[Point2, Point2]]:
    """Portion of the edge a->b with |y| <= 1, or None."""
    lo, hi = 0.0, 1.0
    for sign in (1.0, -1.0):
        fa = sign * a.y - 1.0
        fb = sign * b.y - 1.0
        if fa > 0.0 and fb > 0.0:
            return None
        if fa > 0.0 or fb > 0.0:
            t = fa / (fa - fb)
            if fa > 0.0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
    if hi - lo <= 1e-9:
        return None

    def at(t: float) -> Point2:
        return Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))

    return at(lo), at(hi)


def _rate(q: Point2, focal_x: float) -> float:
    return (q.x - focal_x) / q.y


def _param_for_rate(qa: Point2, qb: Point2, focal_x: float, r: float,
                    fallback: float) -> float:
    """Parameter on segment qa->qb whose point sees rate r from the focal."""
    dx = qb.x - qa.x
    dy = qb.y - qa.y
    den = dx - r * dy
    if abs(den) < 1e-12:
        return fallback
    u = (r * qa.y - (qa.x - focal_x)) / den
    return min(1.0, max(0.0, u))


class _Prober:
    """Checks that an off-script tunnel landing cannot be continued.

    A landing is certified dead when it precedes its launch in traversal
    order, runs against the matching direction, leaves the corridor,
    lands on a mirror edge at an offset outside every carry window, or
    stalls under the no-4-retreat walking rule with every depth-limited
    onward tunnel landing dead in turn.
    """

    _FAMILY_SLACK = {"upper": 21.0, "lower": 17.0, "merge": 13.0,
                     "exit": 9.0}

    def __init__(self, instance: HardnessInstance):
        self.inst = instance
        verts = instance.base.vertices()
        self.edges = list(zip(verts, verts[1:]))
        self.kinds = instance.index.base_edge_kinds
        self.mirror_at: Dict[int, MirrorEdge] = {
            m.edge_index: m for m in instance.index.mirrors}
        self.focals = instance.params.all_focals()

    def _offset_residue_safe(self, m: MirrorEdge, q: Point2) -> bool:
        if m.family in ("upper", "merge"):
            o = abs(q.x - m.enter.x)
        else:
            o = abs(q.x - m.exit.x)
        gamma = self.inst.params.gamma
        u = (o / abs(m.enter.y)) % gamma
        gap = min(u, gamma - u)
        margin = 16.0 * (self.inst.params.k - m.gadget) \
            + self._FAMILY_SLACK[m.family]
        return gap > margin

    def _walk(self, edge_idx: int, start: Point2
              ) -> Tuple[Point2, int, Optional[Tuple[MirrorEdge, Point2]]]:
        """Forward walk under the no-4-retreat rule inside the band."""
        run_max = start.x
        pos = start
        idx = edge_idx
        while True:
            b = self.edges[idx][1]
            end = b
            t_exit = None
            if pos.y != end.y:
                for bound in (1.0, -1.0):
                    t = (bound - pos.y) / (end.y - pos.y)
                    if 1e-12 < t <= 1.0 and abs(
                            pos.y + (t + 1e-9) * (end.y - pos.y)) > 1.0:
                        t_exit = t if t_exit is None else min(t_exit, t)
            if t_exit is not None:
                end = Point2(pos.x + t_exit * (end.x - pos.x),
                             pos.y + t_exit * (end.y - pos.y))
            if end.x < run_max - MIN_EDGE_GAP - 1e-9:
                t = (run_max - MIN_EDGE_GAP - pos.x) / (end.x - pos.x)
                stall = Point2(run_max - MIN_EDGE_GAP,
                               pos.y + t * (end.y - pos.y))
                return stall, idx, None
            run_max = max(run_max, end.x)
            if t_exit is not None:
                return end, idx, None
            idx += 1
            if idx >= len(self.edges):
                return end, idx - 1, None
            if self.kinds[idx] == "mirror":
                m = self.mirror_at[idx]
                return b, idx, (m, b)
            pos = b

    def _ray_landings(self, q: Point2, focal_x: float
                      ) -> List[Tuple[int, Point2]]:
        """Matchable far-side intersections of the line through the focal.

        Landings past the following focal point are dropped: the jump
        must hand the matching back to the axis curve before its next
        pinch, so the landing has to sit within reach of axis points
        short of that pinch.
        """
        out: List[Tuple[int, Point2]] = []
        r = _rate(q, focal_x)
        nxt = min((f for f in self.focals if f > focal_x + 1e-9),
                  default=math.inf)
        for idx, (a, b) in enumerate(self.edges):
            if a.y * q.y >= 0.0 and b.y * q.y >= 0.0:
                continue
            fa = (a.x - focal_x) - r * a.y
            fb = (b.x - focal_x) - r * b.y
            if fa * fb > 0.0:
                continue
            t = 0.5 if fa == fb else fa / (fa - fb)
            pt = Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
            if pt.y * q.y >= 0.0 or abs(pt.y) > 1.0 + 1e-9:
                continue
            if pt.x > nxt + 1.0:
                continue
            if _dist_to_curve(pt, self.inst.target) > 1.0 + 1e-6:
                continue
            out.append((idx, pt))
        return out

    def dead_landing(self, edge_idx: int, q: Point2, launch_edge: int,
                     launch_x_lo: float, depth: int) -> Tuple[bool, str]:
        if edge_idx <= launch_edge:
            return True, "order"
        if q.x < launch_x_lo - 2.5:
            return True, "order"
        if abs(q.y) > 1.0 + 1e-9 or \
                _dist_to_curve(q, self.inst.target) > 1.0 + 1e-6:
            return True, "unmatchable"
        if self.kinds[edge_idx] == "mirror":
            m = self.mirror_at[edge_idx]
            if self._offset_residue_safe(m, q):
                return True, "residue"
            return False, "lands on %s at a viable offset" % m.name
        stall, stall_idx, resume = self._walk(edge_idx, q)
        if resume is not None:
            m, pos = resume
            if not self._offset_residue_safe(m, pos):
                return False, "walk reaches %s at a viable offset" % m.name
            tail = "residue"
        else:
            tail = "walk"
        if depth <= 0:
            return True, tail
        origins = [(edge_idx, q)]
        if resume is None and (stall.x, stall.y) != (q.x, q.y):
            origins.append((stall_idx, stall))
        for oidx, origin in origins:
            del oidx
            # a straight jump crosses the axis once, so it can thread at
            # most one pinch: only the nearest focal ahead is in play
            fx = min((f for f in self.focals if f > origin.x),
                     default=None)
            if fx is None:
                continue
            for idx2, q2 in self._ray_landings(origin, fx):
                d2, why2 = self.dead_landing(idx2, q2, launch_edge,
                                             launch_x_lo, depth - 1)
                if not d2:
                    return False, ("onward tunnel through x=%.6g: %s"
                                   % (fx, why2))
        return True, tail + "+tunnels"


def check_instance_invariants(instance: HardnessInstance,
                              certificate: Optional[PolygonalCurve] = None
                              ) -> InvariantReport:
    """Re-verify the geometric invariants of a built instance.

    Checks mirror band membership, pairwise mirror separation within
    each gadget, buffer-rectangle avoidance by the base curve, corridor
    containment of the mirror edges, axis crossings staying outside the
    corridor, and that every focal-line incidence between a mirror edge
    and connector material is a dead end under the prober's rules.  A
    witness curve, when given, is additionally checked for the
    no-4-retreat property.
    """
    failures: List[str] = []
    idx = instance.index
    verts = instance.base.vertices()
    edges = list(zip(verts, verts[1:]))

    bands_ok = True
    for m in idx.mirrors:
        if abs(m.enter.y - m.exit.y) > 1e-9 or not \
                0.5 - 1e-9 <= abs(m.enter.y) <= 1.0 + 1e-9:
            bands_ok = False
            failures.append("mirror %s leaves the half-to-one band" % m.name)

    separation_ok = True
    by_gadget: Dict[int, List[MirrorEdge]] = {}
    for m in idx.mirrors:
        by_gadget.setdefault(m.gadget, []).append(m)
    for gad, ms in sorted(by_gadget.items()):
        if gad == 0:
            continue
        for m1, m2 in itertools.combinations(ms, 2):
            # nested x spans are fine between teeth of different depths
            # (they deliberately subtend the same wedge); only edges at
            # matching heights must keep clear of each other sideways
            if abs(m1.enter.y - m2.enter.y) >= 0.1:
                continue
            lo1, hi1 = sorted((m1.enter.x, m1.exit.x))
            lo2, hi2 = sorted((m2.enter.x, m2.exit.x))
            gap = max(lo2 - hi1, lo1 - hi2)
            if gap < MIN_EDGE_GAP - 1e-9:
                separation_ok = False
                failures.append("mirrors %s and %s are %.3f apart"
                                % (m1.name, m2.name, gap))

    buffers_ok = True
    for a, b in edges:
        for rect in idx.buffers:
            lo, hi = 0.0, 1.0
            inside_possible = True
            for v0, v1, wlo, whi in ((a.x, b.x, rect.x_lo, rect.x_hi),
                                     (a.y, b.y, rect.y_lo, rect.y_hi)):
                for bound, sign in ((wlo + 1e-9, 1.0), (whi - 1e-9, -1.0)):
                    # f >= 0 exactly where the coordinate is outside
                    f0 = sign * (bound - v0)
                    f1 = sign * (bound - v1)
                    if f0 >= 0.0 and f1 >= 0.0:
                        inside_possible = False
                        break
                    if f0 >= 0.0 or f1 >= 0.0:
                        t = f0 / (f0 - f1)
                        if f0 >= 0.0:
                            lo = max(lo, t)
                        else:
                            hi = min(hi, t)
                if not inside_possible:
                    break
            if inside_possible and hi - lo > 1e-9:
                span = math.hypot(b.x - a.x, b.y - a.y) * (hi - lo)
                if span > 1e-7:
                    buffers_ok = False
                    failures.append(
                        "base curve enters buffer %s near x=%.6g"
                        % (rect.label, a.x + lo * (b.x - a.x)))

    mirrors_in_corridor_ok = True
    for m in idx.mirrors:
        for q in (m.enter, m.exit):
            if _dist_to_curve(q, instance.target) > 1.0 + 1e-6:
                mirrors_in_corridor_ok = False
                failures.append("mirror %s leaves the corridor" % m.name)

    axis_ok = True
    for a, b in edges:
        if a.y == 0.0 or b.y == 0.0 or a.y * b.y < 0.0:
            t = a.y / (a.y - b.y) if a.y != b.y else 0.0
            q = Point2(a.x + t * (b.x - a.x), 0.0)
            if _dist_to_curve(q, instance.target) <= 1.0 + 1e-6:
                axis_ok = False
                failures.append("base curve crosses the axis inside the "
                                "corridor near x=%.6g" % q.x)

    prober = _Prober(instance)
    hits: List[PatternHit] = []
    hits_ok = True
    pieces: List[Tuple[int, Point2, Point2, str]] = []
    for eidx, (a, b) in enumerate(edges):
        if idx.base_edge_kinds[eidx] != "connector":
            continue
        clip = _clip_edge_to_band(a, b)
        if clip is None:
            continue
        pieces.append((eidx, clip[0], clip[1], idx.base_edge_families[eidx]))
    focal_names = (["init:f"]
                   + ["g%d:%s" % (i + 1, nm)
                      for i in range(instance.params.k)
                      for nm in ("p1", "p2", "p3", "p4")]
                   + ["terminal:f"])
    for fname, fx in zip(focal_names, instance.params.all_focals()):
        for m in idx.mirrors:
            launch_x_lo = min(m.enter.x, m.exit.x)
            # jumps from this edge can only thread the nearest pinch
            # ahead of it; pairings with any later focal would have to
            # cross the axis twice
            if any(launch_x_lo < f < fx for f in prober.focals):
                continue
            if fx <= launch_x_lo:
                continue
            r1 = _rate(m.enter, fx)
            r2 = _rate(m.exit, fx)
            mlo, mhi = min(r1, r2), max(r1, r2)
            for eidx, qa, qb, fam in pieces:
                if qa.y * m.enter.y >= 0.0:
                    continue
                ra, rb = _rate(qa, fx), _rate(qb, fx)
                plo, phi = min(ra, rb), max(ra, rb)
                olo, ohi = max(mlo, plo), min(mhi, phi)
                if ohi - olo <= 1e-6:
                    continue
                samples: List[Point2] = []
                for t in (0.0, 0.25, 0.5, 0.75, 1.0):
                    r = olo + t * (ohi - olo)
                    u = _param_for_rate(qa, qb, fx, r, t)
                    samples.append(Point2(qa.x + u * (qb.x - qa.x),
                                          qa.y + u * (qb.y - qa.y)))
                dead = True
                why = ""
                for q in samples:
                    d, w = prober.dead_landing(eidx, q, m.edge_index,
                                               launch_x_lo, depth=1)
                    why = w
                    if not d:
                        dead = False
                        break
                hits.append(PatternHit(fname, m.name, fam, eidx, dead, why))
                if not dead:
                    hits_ok = False
                    failures.append(
                        "live focal incidence: %s from %s onto %s (%s)"
                        % (fname, m.name, fam, why))

    cert_ok: Optional[bool] = None
    if certificate is not None:
        cert_ok = True
        run_max = -math.inf
        for v in certificate.vertices():
            if v.x < run_max - MIN_EDGE_GAP - 1e-6:
                cert_ok = False
                failures.append("certificate retreats more than 4 units "
                                "near x=%.6g" % v.x)
            run_max = max(run_max, v.x)

    return InvariantReport(bands_ok, separation_ok, buffers_ok,
                           mirrors_in_corridor_ok, axis_ok, hits_ok,
                           cert_ok, tuple(hits), tuple(failures))
