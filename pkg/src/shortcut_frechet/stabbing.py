"""Ordered-disk stabbing predicates and the line-stabbing wedge.

A stabber is a segment that visits an ordered sequence of disks: the visit
points must appear along the segment in the given order.  The wedge of a
start segment and an ordered disk sequence is the set of endpoints t for
which some start point yields a stabber.  Membership is decided exactly by
enumerating the start parameters where the greedy predicate can flip, so
the wedge itself never needs an explicit boundary description; one is still
assembled on demand for drawing.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .geometry import Point2, disk_slice_of_edge
from .tolerances import get_eta

_EPS = 1e-12


class Disk(NamedTuple):
    center: Point2
    radius: float


# ---------------------------------------------------------------------------
# greedy ordered stabbing
# ---------------------------------------------------------------------------

def stabs_ordered_disks(seg, disks: Sequence[Disk], slack: float = 0.0) -> bool:
    """Does the segment pass through the disks in order?

    Greedy over the segment parameter: each disk contributes an entry/exit
    interval, the cursor jumps to the latest entry seen so far and fails
    when it overruns an exit.  ``slack`` inflates every radius; a positive
    value keeps borderline tangencies on the succeeding side.
    """
    a, b = seg[0], seg[1]
    cursor = 0.0
    for d in disks:
        sl = disk_slice_of_edge(d.center, a, b, d.radius + slack)
        if sl is None:
            return False
        lo, hi = sl
        if lo > cursor:
            cursor = lo
        if cursor > hi:
            return False
    return True


def stab_realizers(seg, disks: Sequence[Disk], slack: float = 0.0
                   ) -> Optional[List[float]]:
    """Greedy visit parameters along seg, or None when stabbing fails."""
    a, b = seg[0], seg[1]
    cursor = 0.0
    out: List[float] = []
    for d in disks:
        sl = disk_slice_of_edge(d.center, a, b, d.radius + slack)
        if sl is None:
            return None
        lo, hi = sl
        if lo > cursor:
            cursor = lo
        if cursor > hi:
            return None
        out.append(cursor)
    return out


# ---------------------------------------------------------------------------
# numeric oracle over a segment of start points
# ---------------------------------------------------------------------------

def _greedy_batch(sx, sy, tx, ty, centers, radii, slack) -> np.ndarray:
    """Vectorized greedy stab test for segments S -> t.

    sx, sy, tx, ty (and slack) are broadcast-compatible arrays of start
    and end coordinates; returns a boolean array of the broadcast shape.
    All disks are processed in one broadcast pass (the greedy cursor is a
    running maximum along the disk axis), chunked to bound temporaries.
    """
    m = len(radii)
    arrs = np.broadcast_arrays(np.asarray(sx, dtype=float),
                               np.asarray(sy, dtype=float),
                               np.asarray(tx, dtype=float),
                               np.asarray(ty, dtype=float),
                               np.asarray(slack, dtype=float))
    shape = arrs[0].shape
    if m == 0:
        return np.ones(shape, dtype=bool)
    fsx, fsy, ftx, fty, fsl = [a.ravel() for a in arrs]
    cxa = np.array([c[0] for c in centers])[:, None]
    cya = np.array([c[1] for c in centers])[:, None]
    rra = np.asarray(radii, dtype=float)[:, None]
    total = fsx.size
    out = np.empty(total, dtype=bool)
    step = max(1, 1_000_000 // m)
    for s0 in range(0, total, step):
        sel = slice(s0, min(total, s0 + step))
        dx = ftx[sel] - fsx[sel]
        dy = fty[sel] - fsy[sel]
        aa = dx * dx + dy * dy
        degen = aa <= _EPS
        aa_safe = np.where(degen, 1.0, aa)
        # disk axis first: every op streams over contiguous rows
        fx = fsx[sel][None, :] - cxa
        fy = fsy[sel][None, :] - cya
        r = rra + fsl[sel][None, :]
        bb = fx * dx[None, :] + fy * dy[None, :]
        cc = fx * fx + fy * fy - r * r
        disc = bb * bb - aa[None, :] * cc
        sd = np.sqrt(np.maximum(disc, 0.0))
        lo = np.maximum((-bb - sd) / aa_safe[None, :], 0.0)
        hi = np.minimum((-bb + sd) / aa_safe[None, :], 1.0)
        dg = degen[None, :]
        lo = np.where(dg, 0.0, lo)
        hi = np.where(dg, np.where(cc <= 0.0, 1.0, -1.0), hi)
        ok = (disc >= 0.0) | dg
        # running maximum down the disk axis, one contiguous row at a time
        # (ufunc.accumulate is scalar-looped along a strided axis)
        for k in range(1, lo.shape[0]):
            np.maximum(lo[k], lo[k - 1], out=lo[k])
        ok &= lo <= hi
        acc = ok[0]
        for k in range(1, ok.shape[0]):
            acc &= ok[k]
        out[sel] = acc
    return out.reshape(shape)


def _sigma_need_batch(sx, sy, tx, ty, centers, radii, hi_sigma: float,
                      rounds: int = 40) -> np.ndarray:
    """Smallest uniform radius inflation that makes the greedy pass.

    Joint binary search over the inflation, vectorized over start points.
    """
    sx = np.asarray(sx, dtype=float)
    shape = np.broadcast(sx, sy, tx, ty).shape
    lo = np.zeros(shape)
    hi = np.full(shape, hi_sigma)
    for _ in range(rounds):
        mid = 0.5 * (lo + hi)
        ok = _greedy_batch(sx, sy, tx, ty, centers, radii, mid)
        lo = np.where(ok, lo, mid)
        hi = np.where(ok, mid, hi)
    return hi


def stab_from_start(start_set, disks: Sequence[Disk], t,
                    samples: int = 1000) -> bool:
    """Can some point of start_set reach t with an ordered stabber?

    Numerical 1-D search over the start parameter: dense sampling backed
    by a Lipschitz argument (moving the start by h changes the needed
    radius inflation by at most h), so windows that sampling certifies as
    needing too much inflation are excluded and the rest are refined by
    zooming.  A numeric oracle, not an exact predicate.
    """
    if not disks:
        return True
    ax, ay = float(start_set[0][0]), float(start_set[0][1])
    bx, by = float(start_set[1][0]), float(start_set[1][1])
    ulen = math.hypot(bx - ax, by - ay)
    tx, ty = float(t[0]), float(t[1])
    centers = [(float(d.center[0]), float(d.center[1])) for d in disks]
    radii = [float(d.radius) for d in disks]
    if ulen <= _EPS:
        return stabs_ordered_disks(((ax, ay), (tx, ty)), disks)

    scale = max(1.0, ulen, abs(tx), abs(ty),
                max(abs(c[0]) + abs(c[1]) + r for c, r in zip(centers, radii)))
    tol = get_eta() * scale
    vs = np.linspace(0.0, 1.0, samples + 1)
    lo_v, hi_v = 0.0, 1.0
    for _zoom in range(8):
        sx = ax + (lo_v + vs * (hi_v - lo_v)) * (bx - ax)
        sy = ay + (lo_v + vs * (hi_v - lo_v)) * (by - ay)
        ok = _greedy_batch(sx, sy, tx, ty, centers, radii, 0.0)
        if bool(ok.any()):
            return True
        h = (hi_v - lo_v) / samples * ulen
        if h <= tol:
            break
        hi_sigma = max(math.hypot(c[0] - tx, c[1] - ty) + r
                       for c, r in zip(centers, radii)) + ulen + 1.0
        sigma = _sigma_need_batch(sx, sy, tx, ty, centers, radii, hi_sigma)
        best = int(np.argmin(sigma))
        if float(sigma[best]) > 0.5 * h + tol:
            return False
        centre = lo_v + vs[best] * (hi_v - lo_v)
        span = (hi_v - lo_v) / samples
        lo_v = max(0.0, centre - span)
        hi_v = min(1.0, centre + span)
    v_best = 0.5 * (lo_v + hi_v)
    s = (ax + v_best * (bx - ax), ay + v_best * (by - ay))
    return stabs_ordered_disks((s, (tx, ty)), disks, slack=tol)


# ---------------------------------------------------------------------------
# the wedge
# ---------------------------------------------------------------------------

class Wedge:
    """Endpoint set of ordered stabbers leaving a start segment.

    Membership is exact: for a query t, the greedy predicate over the
    start parameter v can only flip where the line S(v) -> t becomes
    tangent to a disk, where S(v) crosses a circle, or where the line
    passes through an intersection point of two circles.  Testing those
    candidate parameters (and midpoints between them) decides membership.
    """

    __slots__ = ("start", "disks", "_ax", "_ay", "_ux", "_uy",
                 "_centers", "_radii", "_tips", "_static_vs", "_scale",
                 "_chain", "_rays")

    def __init__(self, start_set, disks: Sequence[Disk]):
        self.start = ((float(start_set[0][0]), float(start_set[0][1])),
                      (float(start_set[1][0]), float(start_set[1][1])))
        self.disks = tuple(Disk(Point2(float(d.center[0]), float(d.center[1])),
                                float(d.radius)) for d in disks)
        (ax, ay), (bx, by) = self.start
        self._ax, self._ay = ax, ay
        self._ux, self._uy = bx - ax, by - ay
        m = len(self.disks)
        self._centers = np.array([[d.center[0], d.center[1]]
                                  for d in self.disks]).reshape(m, 2)
        self._radii = np.array([d.radius for d in self.disks]).reshape(m)
        self._tips = self._collect_tips()
        self._static_vs = self._collect_static_vs()
        span = 1.0
        if m:
            span = max(span, float(np.max(np.abs(self._centers))
                                   + np.max(self._radii)))
        self._scale = max(span, abs(ax), abs(ay), abs(bx), abs(by), 1.0)
        self._chain = None
        self._rays = None

    # -- construction helpers -------------------------------------------

    def _collect_tips(self) -> np.ndarray:
        pts: List[Tuple[float, float]] = []
        m = len(self.disks)
        for i in range(m):
            for j in range(i + 1, m):
                pts.extend(_circle_circle_points(self.disks[i], self.disks[j]))
        if not pts:
            return np.zeros((0, 2))
        return np.array(pts)

    def _collect_static_vs(self) -> List[float]:
        """Start parameters where the start point crosses a circle."""
        out = [0.0, 1.0]
        ux, uy = self._ux, self._uy
        uu = ux * ux + uy * uy
        if uu <= _EPS:
            return out
        for d in self.disks:
            wx = d.center[0] - self._ax
            wy = d.center[1] - self._ay
            bb = -(wx * ux + wy * uy)
            cc = wx * wx + wy * wy - d.radius * d.radius
            disc = bb * bb - uu * cc
            if disc < 0.0:
                continue
            sd = math.sqrt(disc)
            for root in ((-bb - sd) / uu, (-bb + sd) / uu):
                if 0.0 < root < 1.0:
                    out.append(root)
        return out

    # -- membership ------------------------------------------------------

    def _candidate_matrix(self, tx: np.ndarray, ty: np.ndarray) -> np.ndarray:
        """Per-query start parameters to test, shape (N, K).

        Roots falling outside the open unit interval are NaN (the segment
        ends are always present as static candidates), so downstream code
        can evaluate only the valid entries.
        """
        n = tx.shape[0]
        ax, ay, ux, uy = self._ax, self._ay, self._ux, self._uy
        w1x = tx - ax
        w1y = ty - ay
        cols = [np.tile(np.array(self._static_vs), (n, 1))]
        uu = ux * ux + uy * uy
        if len(self.disks) and uu > _EPS:
            cx = self._centers[:, 0][None, :]
            cy = self._centers[:, 1][None, :]
            rr = self._radii[None, :]
            w2x = cx - ax
            w2y = cy - ay
            c0 = w1x[:, None] * w2y - w1y[:, None] * w2x
            c12 = (w1x[:, None] * uy - w1y[:, None] * ux) + (ux * w2y - uy * w2x)
            w1u = w1x * ux + w1y * uy
            w1sq = w1x * w1x + w1y * w1y
            qa = c12 * c12 - rr * rr * uu
            qb = -2.0 * c0 * c12 + 2.0 * rr * rr * w1u[:, None]
            qc = c0 * c0 - rr * rr * w1sq[:, None]
            disc = qb * qb - 4.0 * qa * qc
            sd = np.sqrt(np.maximum(disc, 0.0))
            qa_safe = np.where(np.abs(qa) <= _EPS, 1.0, qa)
            lin = np.where(np.abs(qb) > _EPS, -qc / np.where(
                np.abs(qb) <= _EPS, 1.0, qb), np.nan)
            r1 = np.where(np.abs(qa) <= _EPS, lin, (-qb - sd) / (2.0 * qa_safe))
            r2 = np.where(np.abs(qa) <= _EPS, lin, (-qb + sd) / (2.0 * qa_safe))
            bad = (disc < 0.0) & (np.abs(qa) > _EPS)
            r1 = np.where(bad, np.nan, r1)
            r2 = np.where(bad, np.nan, r2)
            cols.append(np.where((r1 > 0.0) & (r1 < 1.0), r1, np.nan))
            cols.append(np.where((r2 > 0.0) & (r2 < 1.0), r2, np.nan))
            if len(self._tips):
                px = self._tips[:, 0][None, :]
                py = self._tips[:, 1][None, :]
                wpx = px - ax
                wpy = py - ay
                c0p = w1x[:, None] * wpy - w1y[:, None] * wpx
                c12p = (w1x[:, None] * uy - w1y[:, None] * ux) + (
                    ux * wpy - uy * wpx)
                c12p_safe = np.where(np.abs(c12p) <= _EPS, 1.0, c12p)
                vt = np.where(np.abs(c12p) <= _EPS, np.nan, c0p / c12p_safe)
                cols.append(np.where((vt > 0.0) & (vt < 1.0), vt, np.nan))
        cand = np.concatenate(cols, axis=1)
        cand = np.sort(cand, axis=1)          # NaNs land at the back
        mids = 0.5 * (cand[:, :-1] + cand[:, 1:])
        return np.concatenate([cand, mids], axis=1)

    def _coarse_keep(self, tx: np.ndarray, ty: np.ndarray,
                     pad: float) -> Optional[np.ndarray]:
        """Necessary-condition filter over query points, None for all-pass.

        Every segment available to the greedy runs from somewhere on the
        start segment to the query point, and the union of those segments
        over the whole start segment is the triangle (A, B, t).  A query
        whose triangle stays clear of the first or the last disk cannot
        be a member, so only survivors need the candidate machinery.  The
        test errs on the keep side when the triangle degenerates.  Disks
        already touching the start segment pass outright (common for the
        first disk, which usually overlaps the launch interval).
        """
        ax, ay = self._ax, self._ay
        bx, by = ax + self._ux, ay + self._uy
        ab2 = self._ux * self._ux + self._uy * self._uy
        keep: Optional[np.ndarray] = None
        last = len(self.disks) - 1
        for di in ((0,) if last == 0 else (0, last)):
            cx = float(self._centers[di, 0])
            cy = float(self._centers[di, 1])
            rad = float(self._radii[di]) + pad
            if ab2 > 0.0:
                h = min(1.0, max(0.0, ((cx - ax) * self._ux +
                                       (cy - ay) * self._uy) / ab2))
            else:
                h = 0.0
            if math.hypot(ax + h * self._ux - cx,
                          ay + h * self._uy - cy) <= rad:
                continue
            ok = np.zeros(len(tx), dtype=bool)
            r2 = rad * rad
            for px, py in ((ax, ay), (bx, by)):
                ux = tx - px
                uy = ty - py
                den = ux * ux + uy * uy
                hh = ((cx - px) * ux + (cy - py) * uy) / np.where(
                    den > 0.0, den, 1.0)
                hh = np.minimum(1.0, np.maximum(0.0, hh))
                dx = px + hh * ux - cx
                dy = py + hh * uy - cy
                ok |= dx * dx + dy * dy <= r2
            s0 = self._ux * (ty - ay) - self._uy * (tx - ax)
            c1 = self._ux * (cy - ay) - self._uy * (cx - ax)
            c2 = (tx - bx) * (cy - by) - (ty - by) * (cx - bx)
            c3 = (ax - tx) * (cy - ty) - (ay - ty) * (cx - tx)
            ok |= (c1 * s0 >= 0.0) & (c2 * s0 >= 0.0) & (c3 * s0 >= 0.0)
            keep = ok if keep is None else (keep & ok)
            if not keep.any():
                break
        return keep

    def _membership_exact(self, tx: np.ndarray, ty: np.ndarray,
                          slack: float) -> np.ndarray:
        """Full candidate-and-greedy membership, no pre-filter."""
        vv = self._candidate_matrix(tx, ty)
        valid = ~np.isnan(vv)
        rows = np.broadcast_to(np.arange(len(tx))[:, None], vv.shape)[valid]
        vflat = vv[valid]
        sx = self._ax + vflat * self._ux
        sy = self._ay + vflat * self._uy
        centers = [tuple(c) for c in self._centers]
        ok = _greedy_batch(sx, sy, tx[rows], ty[rows],
                           centers, list(self._radii), slack)
        # rows are emitted row-major, and the static candidates keep every
        # row nonempty, so a segmented any() collapses the flat results
        starts = np.searchsorted(rows, np.arange(len(tx)), "left")
        return np.bitwise_or.reduceat(ok, starts)

    def membership_many(self, ts) -> np.ndarray:
        """Exact membership for an (N, 2) array of query points."""
        ts = np.asarray(ts, dtype=float).reshape(-1, 2)
        if not len(self.disks):
            return np.ones(len(ts), dtype=bool)
        if not len(ts):
            return np.zeros(0, dtype=bool)
        tx = ts[:, 0]
        ty = ts[:, 1]
        # one conservative slack for the whole batch (tolerance band only
        # ever widens, never shrinks)
        slack = get_eta() * max(self._scale,
                                float(np.max(np.abs(tx))),
                                float(np.max(np.abs(ty))))
        pad = slack + 1e-9 + 1e-12 * self._scale
        keep = self._coarse_keep(tx, ty, pad)
        if keep is None:
            return self._membership_exact(tx, ty, slack)
        res = np.zeros(len(ts), dtype=bool)
        if not keep.any():
            return res
        if keep.all():
            return self._membership_exact(tx, ty, slack)
        idx = np.flatnonzero(keep)
        res[idx] = self._membership_exact(tx[idx], ty[idx], slack)
        return res

    def membership(self, t) -> bool:
        return bool(self.membership_many([(float(t[0]), float(t[1]))])[0])

    def membership_witness(self, t) -> Optional[float]:
        """A start parameter realizing membership, or None."""
        if not len(self.disks):
            return 0.0
        tx = np.array([float(t[0])])
        ty = np.array([float(t[1])])
        vv = self._candidate_matrix(tx, ty)[0]
        slack = get_eta() * max(self._scale, abs(tx[0]), abs(ty[0]))
        for v in vv:
            if math.isnan(v):
                continue
            s = (self._ax + v * self._ux, self._ay + v * self._uy)
            if stabs_ordered_disks((s, (tx[0], ty[0])), self.disks,
                                   slack=slack):
                return float(v)
        return None

    # -- derived boundary description ------------------------------------

    @property
    def tangent_rays(self):
        """The two extreme rays, numerically located (for drawing)."""
        if self._rays is None:
            self._rays = self._find_rays()
        return self._rays

    def _find_rays(self):
        anchor = np.array([self._ax + 0.5 * self._ux,
                           self._ay + 0.5 * self._uy])
        rr = 64.0 * self._scale
        thetas = np.linspace(-math.pi, math.pi, 721)
        pts = anchor[None, :] + rr * np.stack(
            [np.cos(thetas), np.sin(thetas)], axis=1)
        ok = self.membership_many(pts)
        if not ok.any():
            return None
        if ok.all():
            return None
        # largest circular run of feasible directions
        idx = np.where(ok[:-1])[0]
        runs = np.split(idx, np.where(np.diff(idx) != 1)[0] + 1)
        if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == len(ok) - 2:
            runs[0] = np.concatenate([runs[-1], runs[0] + len(ok) - 1])
            runs.pop()
        run = max(runs, key=len)
        th_lo = thetas[run[0] % len(thetas)]
        th_hi = thetas[run[-1] % len(thetas)]
        out = []
        for th in (th_lo, th_hi):
            d = (math.cos(th), math.sin(th))
            p1 = (anchor[0] + 2.0 * self._scale * d[0],
                  anchor[1] + 2.0 * self._scale * d[1])
            out.append((p1, d))
        return tuple(out)

    @property
    def boundary(self):
        """Connected chain of boundary pieces, sampled numerically.

        Pieces are (kind, payload): kind "arc" carries (disk_index,
        angle_lo, angle_hi) and kind "seg" carries two points.  Intended
        for drawing and diagnostics; membership never consults it.
        """
        if self._chain is None:
            self._chain = self._sample_chain()
        return self._chain

    def _sample_chain(self):
        anchor = np.array([self._ax + 0.5 * self._ux,
                           self._ay + 0.5 * self._uy])
        if len(self.disks):
            anchor = 0.5 * (anchor + self._centers.mean(axis=0))
        rmax = 8.0 * self._scale
        nth, nr = 192, 48
        thetas = np.linspace(-math.pi, math.pi, nth, endpoint=False)
        radii = np.linspace(0.0, rmax, nr)
        grid = anchor[None, None, :] + radii[None, :, None] * np.stack(
            [np.cos(thetas), np.sin(thetas)], axis=1)[:, None, :]
        ok = self.membership_many(grid.reshape(-1, 2)).reshape(nth, nr)
        pts: List[Tuple[float, float]] = []
        labels: List[int] = []
        for a in range(nth):
            row = ok[a]
            trans = np.where(row[:-1] != row[1:])[0]
            if len(trans) == 0:
                continue
            b = trans[-1]
            lo, hi = radii[b], radii[b + 1]
            inside_lo = bool(row[b])
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                p = (anchor[0] + mid * math.cos(thetas[a]),
                     anchor[1] + mid * math.sin(thetas[a]))
                if self.membership(p) == inside_lo:
                    lo = mid
                else:
                    hi = mid
            p = (anchor[0] + lo * math.cos(thetas[a]),
                 anchor[1] + lo * math.sin(thetas[a]))
            pts.append(p)
            labels.append(self._binding_disk(p))
        pieces = []
        k = 0
        while k < len(pts):
            j = k
            while j + 1 < len(pts) and labels[j + 1] == labels[k]:
                j += 1
            if labels[k] >= 0 and j > k:
                d = self.disks[labels[k]]
                angs = [math.atan2(p[1] - d.center[1], p[0] - d.center[0])
                        for p in pts[k:j + 1]]
                pieces.append(("arc", (labels[k], min(angs), max(angs))))
            else:
                pieces.append(("seg", (pts[k], pts[j])))
            k = j + 1
        return pieces

    def _binding_disk(self, p) -> int:
        best, best_err = -1, math.inf
        for k, d in enumerate(self.disks):
            err = abs(math.hypot(p[0] - d.center[0], p[1] - d.center[1])
                      - d.radius)
            if err < best_err:
                best, best_err = k, err
        if best_err > 0.05 * self._scale:
            return -1
        return best


def wedge_build(start_set, disks: Sequence[Disk]) -> Wedge:
    """Wedge of endpoints reachable by ordered stabbers from start_set."""
    return Wedge(start_set, disks)


# ---------------------------------------------------------------------------
# wedge / segment intersection
# ---------------------------------------------------------------------------

def wedge_intersect_segment(w: Wedge, e) -> List[Tuple[float, float]]:
    """Parameter intervals of segment e lying inside the wedge.

    Closed-form boundary candidates (circle crossings, tangent lines from
    the start endpoints, common tangents of disk pairs, lines through
    circle intersection points) are combined with a uniform scan; every
    transition is then refined by bisection on exact membership.
    """
    return wedge_intersect_edges(w, [e])[0]


def _wedge_lines(w: Wedge):
    """Edge-independent boundary-support lines of the wedge.

    Returned as two lists: point-direction lines (tangents from the two
    start endpoints, lines through lens tips) and normal-offset lines
    (common tangents of disk pairs).
    """
    point_dir: List[Tuple[Tuple[float, float], Tuple[float, float]]] = []
    for p in (w.start[0], w.start[1]):
        for d in w.disks:
            for direction in _tangent_dirs_from_point(p, d):
                point_dir.append((p, direction))
        for tip in w._tips:
            point_dir.append((p, (tip[0] - p[0], tip[1] - p[1])))
    normal_off: List[Tuple[Tuple[float, float], float]] = []
    md = len(w.disks)
    for i in range(md):
        for j in range(i + 1, md):
            normal_off.extend(_pair_tangent_lines(w.disks[i], w.disks[j]))
    return point_dir, normal_off


def wedge_intersect_edges(w: Wedge, edges) -> List[List[Tuple[float, float]]]:
    """wedge_intersect_segment over several edges in one batch.

    All probe classifications go through a single membership call and all
    boundary refinements bisect in lockstep, which amortizes the per-call
    cost of the vectorized greedy.
    """
    if not edges:
        return []
    if not len(w.disks):
        return [[(0.0, 1.0)] for _ in edges]
    eta = get_eta()
    point_dir, normal_off = _wedge_lines(w)
    uniform = [float(u) for u in np.linspace(0.0, 1.0, 33)]

    probe_lists: List[List[float]] = []
    coords: List[Tuple[float, float, float, float]] = []
    tols: List[float] = []
    flat_pts: List[Tuple[float, float]] = []
    for e in edges:
        ax, ay = float(e[0][0]), float(e[0][1])
        bx, by = float(e[1][0]), float(e[1][1])
        ex, ey = bx - ax, by - ay
        coords.append((ax, ay, ex, ey))
        # parameter tolerance worth one position tolerance on this edge;
        # short edges get a coarse parameter stop, long ones a fine one,
        # and either way refined endpoints sit within eta * scale of the
        # true crossing
        scale_e = max(w._scale, abs(ax), abs(ay), abs(bx), abs(by))
        tols.append(min(0.45, eta * scale_e / max(math.hypot(ex, ey), _EPS)))
        cands = {0.0, 1.0}
        for d in w.disks:
            for root in _segment_circle_roots(ax, ay, ex, ey, d):
                cands.add(root)
        for p, direction in point_dir:
            u = _line_hit_param(p, direction, ax, ay, ex, ey)
            if u is not None:
                cands.add(u)
        for n, h in normal_off:
            denom = n[0] * ex + n[1] * ey
            if abs(denom) > _EPS:
                u = (h - n[0] * ax - n[1] * ay) / denom
                if -0.01 <= u <= 1.01:
                    cands.add(min(1.0, max(0.0, u)))
        cands.update(uniform)
        us = sorted(cands)
        probes = []
        for u0, u1 in zip(us, us[1:]):
            probes.append(u0)
            probes.append(0.5 * (u0 + u1))
        probes.append(us[-1])
        probe_lists.append(probes)
        flat_pts.extend((ax + u * ex, ay + u * ey) for u in probes)
    pts_arr = np.array(flat_pts)
    flags_flat = w.membership_many(pts_arr)
    # one slack for the whole refinement: probes span every bisection
    # point, so the batch maximum here covers later rounds too
    slack_all = get_eta() * max(w._scale, float(np.max(np.abs(pts_arr))))

    # runs of member probes; interval ends that sit strictly inside the
    # probe sequence become bisection brackets (inside value, outside value)
    raw: List[List[List[float]]] = []
    brackets: List[Tuple[int, int, int, float, float]] = []
    base = 0
    for eidx, probes in enumerate(probe_lists):
        flags = flags_flat[base:base + len(probes)]
        base += len(probes)
        ivs: List[List[float]] = []
        idx = 0
        while idx < len(probes):
            if not flags[idx]:
                idx += 1
                continue
            start_i = idx
            while idx + 1 < len(probes) and flags[idx + 1]:
                idx += 1
            end_i = idx
            ivs.append([probes[start_i], probes[end_i]])
            slot = len(ivs) - 1
            if start_i > 0:
                brackets.append((eidx, slot, 0,
                                 probes[start_i], probes[start_i - 1]))
            if end_i + 1 < len(probes):
                brackets.append((eidx, slot, 1,
                                 probes[end_i], probes[end_i + 1]))
            idx += 1
        raw.append(ivs)

    if brackets:
        u_in = np.array([b[3] for b in brackets])
        u_out = np.array([b[4] for b in brackets])
        eax = np.array([coords[b[0]][0] for b in brackets])
        eay = np.array([coords[b[0]][1] for b in brackets])
        eex = np.array([coords[b[0]][2] for b in brackets])
        eey = np.array([coords[b[0]][3] for b in brackets])
        btol = np.array([tols[b[0]] for b in brackets])
        active = np.abs(u_out - u_in) > btol
        while active.any():
            mid = 0.5 * (u_in + u_out)
            sel = np.where(active)[0]
            # boundary refinement hugs the wedge, so the coarse filter
            # would pass everything anyway; go straight to the core
            good = w._membership_exact(eax[sel] + mid[sel] * eex[sel],
                                       eay[sel] + mid[sel] * eey[sel],
                                       slack_all)
            u_in[sel] = np.where(good, mid[sel], u_in[sel])
            u_out[sel] = np.where(good, u_out[sel], mid[sel])
            active = np.abs(u_out - u_in) > btol
        for (eidx, slot, side, _, _), val in zip(brackets, u_in):
            raw[eidx][slot][side] = float(val)

    out: List[List[Tuple[float, float]]] = []
    for eidx, ivs in enumerate(raw):
        tol = tols[eidx]
        merged: List[Tuple[float, float]] = []
        for lo, hi in ivs:
            if hi - lo < tol:
                continue
            if merged and lo <= merged[-1][1] + tol:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        out.append(merged)
    return out


# ---------------------------------------------------------------------------
# circle helpers
# ---------------------------------------------------------------------------

def _segment_circle_roots(ax, ay, ex, ey, d: Disk) -> List[float]:
    fx = ax - d.center[0]
    fy = ay - d.center[1]
    aa = ex * ex + ey * ey
    if aa <= _EPS:
        return []
    bb = fx * ex + fy * ey
    cc = fx * fx + fy * fy - d.radius * d.radius
    disc = bb * bb - aa * cc
    if disc < 0.0:
        return []
    sd = math.sqrt(disc)
    return [u for u in ((-bb - sd) / aa, (-bb + sd) / aa) if 0.0 < u < 1.0]


def _tangent_dirs_from_point(p, d: Disk) -> List[Tuple[float, float]]:
    dx = d.center[0] - p[0]
    dy = d.center[1] - p[1]
    ll = math.hypot(dx, dy)
    if ll <= d.radius + _EPS:
        return []
    alpha = math.asin(min(1.0, d.radius / ll))
    out = []
    for sgn in (1.0, -1.0):
        ca, sa = math.cos(sgn * alpha), math.sin(sgn * alpha)
        out.append((dx * ca - dy * sa, dx * sa + dy * ca))
    return out


def _line_hit_param(p, direction, ax, ay, ex, ey) -> Optional[float]:
    denom = direction[0] * ey - direction[1] * ex
    if abs(denom) <= _EPS:
        return None
    u = (direction[0] * (p[1] - ay) - direction[1] * (p[0] - ax)) / denom
    if -0.01 <= u <= 1.01:
        return min(1.0, max(0.0, u))
    return None


def _pair_tangent_lines(d1: Disk, d2: Disk) -> List[Tuple[Tuple[float, float], float]]:
    """Common tangent lines as (unit normal, offset) with n.x = offset."""
    out = []
    dx = d2.center[0] - d1.center[0]
    dy = d2.center[1] - d1.center[1]
    ll = math.hypot(dx, dy)
    if ll <= _EPS:
        return out
    ux, uy = dx / ll, dy / ll
    # outer tangents satisfy n . d = r1 - r2, inner ones n . d = r1 + r2
    for r2sign in (-1.0, 1.0):
        c = (d1.radius + r2sign * d2.radius) / ll
        if abs(c) > 1.0:
            continue
        s = math.sqrt(max(0.0, 1.0 - c * c))
        for ssign in (1.0, -1.0):
            nx = ux * c - uy * s * ssign
            ny = ux * s * ssign + uy * c
            h = nx * d1.center[0] + ny * d1.center[1] + d1.radius
            out.append(((nx, ny), h))
    return out


def _circle_circle_points(d1: Disk, d2: Disk) -> List[Tuple[float, float]]:
    dx = d2.center[0] - d1.center[0]
    dy = d2.center[1] - d1.center[1]
    ll = math.hypot(dx, dy)
    r1, r2 = d1.radius, d2.radius
    if ll <= _EPS or ll > r1 + r2 or ll < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + ll * ll) / (2.0 * ll)
    h2 = r1 * r1 - a * a
    h = math.sqrt(max(0.0, h2))
    mx = d1.center[0] + a * dx / ll
    my = d1.center[1] + a * dy / ll
    if h <= _EPS:
        return [(mx, my)]
    ox = -dy / ll * h
    oy = dx / ll * h
    return [(mx + ox, my + oy), (mx - ox, my - oy)]
