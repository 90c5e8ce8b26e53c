"""Brute-force oracles for the test suite.

Nothing in here is used by the deciders; the oracles are deliberately
independent (dense resampling + dynamic programming, and exhaustive
shortcut enumeration) so they can vouch for the production code.
"""
from __future__ import annotations

import itertools
import math
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .geometry import CurveLocation, PolygonalCurve, apply_shortcuts


class DenseSampling:
    """A curve resampled at m equally spaced global parameters."""

    __slots__ = ("curve", "points", "params")

    def __init__(self, curve: PolygonalCurve, m: int):
        if m < 2:
            raise ValueError("need at least 2 samples")
        ts = np.linspace(0.0, 1.0, m)
        g = ts * curve.n_edges
        e = np.minimum(curve.n_edges - 1, np.floor(g).astype(int))
        u = g - e
        P = curve.pts
        self.points = P[e] + u[:, None] * (P[e + 1] - P[e])
        self.params = ts
        self.curve = curve

    @property
    def m(self) -> int:
        return len(self.points)

    def step_bound(self) -> float:
        """Largest distance between consecutive samples (sampling slack)."""
        d = np.diff(self.points, axis=0)
        return float(np.max(np.hypot(d[:, 0], d[:, 1])))


def discrete_frechet(c1: DenseSampling, c2: DenseSampling) -> float:
    """Classical discrete Fréchet DP over the coupling grid."""
    A = c1.points
    B = c2.points
    m1 = len(A)
    m2 = len(B)
    D = np.hypot(A[:, 0:1] - B[None, :, 0], A[:, 1:2] - B[None, :, 1])
    row = D[0]
    prev = list(np.maximum.accumulate(row))
    for i in range(1, m1):
        row = D[i]
        cur = [0.0] * m2
        cur[0] = max(row[0], prev[0])
        for j in range(1, m2):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = row[j] if row[j] > best else best
        prev = cur
    return float(prev[m2 - 1])


# ----------------------------------------------------------------------
# discretized shortcut search
# ----------------------------------------------------------------------



class BruteResult(NamedTuple):
    upper_bound: float    # certified: d^k_S(T, B) <= upper_bound
    passed_margin: float  # min over combos of (discrete value - combo slack)
    slack: float          # slack of the margin-minimizing combo


def _candidate_locations(B: PolygonalCurve, grid_m: int) -> List[CurveLocation]:
    locs: List[CurveLocation] = []
    seen = set()
    for e in range(B.n_edges):
        for s in range(grid_m):
            u = s / (grid_m - 1) if grid_m > 1 else 0.0
            key = round(e + u, 12)
            if key not in seen:
                seen.add(key)
                locs.append(CurveLocation(e, u))
    return locs


def brute_shortcut_search(T: PolygonalCurve, B: PolygonalCurve, k: int,
                          grid_m: int, sample_m: int = 200,
                          budget: int = 2_000_000) -> BruteResult:
    """Exhaustive search over discretized k'-shortcut curves (k' <= k).

    Every combo certifies d^k_S(T, B) <= discrete + slack where slack is the
    sum of the two sampling step bounds, so upper_bound is sound.  The
    passed_margin supports the one-sided decision below.
    """
    locs = _candidate_locations(B, grid_m)
    n_loc = len(locs)
    combos = 1
    for kk in range(1, k + 1):
        combos += math.comb(n_loc, 2 * kk)
    if combos > budget:
        raise ValueError(f"brute-force budget exceeded ({combos} > {budget})")

    dT = DenseSampling(T, sample_m)
    step_t = dT.step_bound()

    def evaluate(curve: PolygonalCurve) -> Tuple[float, float]:
        dS = DenseSampling(curve, sample_m)
        return discrete_frechet(dT, dS), step_t + dS.step_bound()

    val, sl = evaluate(B)
    ub = val + sl
    margin = val - sl
    margin_slack = sl
    for kk in range(1, k + 1):
        for idx in itertools.combinations(range(n_loc), 2 * kk):
            pairs = [(locs[idx[2 * t]], locs[idx[2 * t + 1]]) for t in range(kk)]
            sc = apply_shortcuts(B, pairs)
            val, sl = evaluate(sc)
            ub = min(ub, val + sl)
            if val - sl < margin:
                margin = val - sl
                margin_slack = sl
    return BruteResult(ub, margin, margin_slack)


def brute_shortcut_decide(T: PolygonalCurve, B: PolygonalCurve, k: int,
                          delta: float, grid_m: int, sample_m: int = 200) -> bool:
    """One-sided oracle: True means some discretized shortcut curve passed
    the sampled check at delta, which implies d^k_S(T, B) <= delta + 2*slack
    for that combo's slack.  False is inconclusive."""
    res = brute_shortcut_search(T, B, k, grid_m, sample_m=sample_m)
    return res.passed_margin <= delta


# ---------------------------------------------------------------------------
# curve families with provable packedness constants
# ---------------------------------------------------------------------------

def collinear_curve(n: int, length: float = 10.0,
                    origin: Tuple[float, float] = (0.0, 0.0)) -> PolygonalCurve:
    """n-vertex monotone polyline on a straight line; exactly 2-packed.

    Any ball of radius r meets the carrier line in a chord of length at
    most 2r, and a monotone traversal covers it once.
    """
    ox, oy = origin
    return PolygonalCurve([(ox + length * i / (n - 1), oy) for i in range(n)])


def staircase_curve(steps: int, step: float = 1.0,
                    origin: Tuple[float, float] = (0.0, 0.0)) -> PolygonalCurve:
    """Axis-aligned monotone staircase; 4-packed.

    Inside any ball of radius r both coordinates vary by at most 2r, and
    an xy-monotone rectilinear curve has length = x-variation plus
    y-variation, so at most 4r of it fits.
    """
    ox, oy = origin
    pts = [(ox, oy)]
    for s in range(steps):
        pts.append((ox + (s + 1) * step, oy + s * step))
        pts.append((ox + (s + 1) * step, oy + (s + 1) * step))
    return PolygonalCurve(pts)


def star_curve(arm: float = 1.0, subdivisions: int = 1,
               origin: Tuple[float, float] = (0.0, 0.0)) -> PolygonalCurve:
    """Four spokes traversed out and back; 8-packed.

    The spokes form two perpendicular lines, each covered twice; a ball
    of radius r takes a chord of at most 2r from each line, giving at
    most 8r of curve.  The bound is attained at the center.
    """
    ox, oy = origin
    tips = [(arm, 0.0), (0.0, arm), (-arm, 0.0), (0.0, -arm)]
    pts = [(ox, oy)]
    for tx, ty in tips:
        for s in range(1, subdivisions + 1):
            f = s / subdivisions
            pts.append((ox + f * tx, oy + f * ty))
        for s in range(subdivisions - 1, -1, -1):
            f = s / subdivisions
            pts.append((ox + f * tx, oy + f * ty))
    return PolygonalCurve(pts)
