"""Grid-approximate decider: lattice fans, tunnels, one-sided verdicts."""

import math
import random
from types import SimpleNamespace

import pytest

from shortcut_frechet.decider_apx import (
    AT_MOST_3PLUS_EPS_DELTA,
    GREATER_THAN_DELTA,
    GridSpec,
    apx_diagonal_tunnel,
    decide_apx,
    decide_apx_report,
    vertical_tunnel,
)
from shortcut_frechet.decider_exact import decide_exact
from shortcut_frechet.freespace import cell_free_space, reach_membership
from shortcut_frechet.geometry import (
    CurveLocation,
    PolygonalCurve,
    Segment,
    bounding_scale,
    segment_to_curve_frechet_value,
    subcurve,
)

ZIG_BASE = [(0, 0), (1, 1), (2, 0)]
ZIG_TARGET = [(0, 0), (2, 0)]


def rnd_curve(rng, n, span=10.0):
    return PolygonalCurve([(rng.uniform(0, span), rng.uniform(0, span))
                           for _ in range(n)])


def near_pt(rng, c, rad):
    ang = rng.uniform(0, 2 * math.pi)
    rr = rng.uniform(0, rad)
    return (c[0] + rr * math.cos(ang), c[1] + rr * math.sin(ang))


# ----------------------------------------------------------------------
# the lattice
# ----------------------------------------------------------------------

def test_grid_points_stay_in_disk():
    g = GridSpec(0.25)
    pts = g.points_in_disk((0.3, -0.7), 1.0)
    assert len(pts) > 0
    for x, y in pts:
        assert (x - 0.3) ** 2 + (y + 0.7) ** 2 <= 1.0 + 1e-9
        # lattice points are integer multiples of the spacing
        assert abs(x / 0.25 - round(x / 0.25)) < 1e-9
        assert abs(y / 0.25 - round(y / 0.25)) < 1e-9
    # roughly pi*r^2/g^2 of them
    assert len(pts) > math.pi / 0.25 ** 2 * 0.7


def test_grid_boundary_points_included():
    pts = GridSpec(1.0).points_in_disk((0.0, 0.0), 2.0)
    assert any(x == 2.0 and y == 0.0 for x, y in pts)


def test_grid_rejects_zero_spacing():
    with pytest.raises(ValueError):
        GridSpec(0.0).points_in_disk((0.0, 0.0), 1.0)


# ----------------------------------------------------------------------
# worked examples of the decider
# ----------------------------------------------------------------------

def test_zigzag_one_shortcut():
    T = PolygonalCurve(ZIG_TARGET)
    B = PolygonalCurve(ZIG_BASE)
    rep = decide_apx_report(T, B, 1, 0.1, 0.5)
    assert rep.verdict == AT_MOST_3PLUS_EPS_DELTA
    assert rep.shortcuts_used == 1


def test_identical_curves():
    c = PolygonalCurve([(0, 0), (3, 1), (5, 0)])
    for k in (0, 3):
        rep = decide_apx_report(c, c, k, 0.05, 1.0)
        assert rep.verdict == AT_MOST_3PLUS_EPS_DELTA
        assert rep.shortcuts_used == 0


def test_far_parallel_curves():
    a = PolygonalCurve([(0, 0), (1, 0), (2, 0)])
    b = PolygonalCurve([(0, 10), (1, 10), (2, 10)])
    rep = decide_apx_report(a, b, 2, 1.0, 1.0)
    assert rep.verdict == GREATER_THAN_DELTA
    # the endpoint gate fires before any cell is visited
    assert rep.stats["rounds_run"] == 0
    assert rep.stats["cells_scanned"] == 0


def test_parameter_validation():
    c = PolygonalCurve([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        decide_apx(c, c, -1, 1.0, 0.5)
    with pytest.raises(ValueError):
        decide_apx(c, c, 0, 0.0, 0.5)
    with pytest.raises(ValueError):
        decide_apx(c, c, 0, 1.0, 0.0)
    with pytest.raises(ValueError):
        decide_apx(c, c, 0, 1.0, 1.5)
    with pytest.raises(ValueError):
        apx_diagonal_tunnel(c, c, (0.0, 0.0), (0, 0), 2.0, 1.0)
    with pytest.raises(ValueError):
        apx_diagonal_tunnel(c, c, (0.0, 0.0), (0, 0), 0.5, -1.0)


def test_spike_base_needs_a_fan():
    """A spike on the base forces a proper (column-crossing) tunnel."""
    T = PolygonalCurve([(0, 0), (2, 0), (4, 0), (6, 0)])
    B = PolygonalCurve([(0, 0), (2, 0), (3, 6), (4, 0), (6, 0)])
    rep = decide_apx_report(T, B, 1, 0.5, 0.5)
    assert rep.verdict == AT_MOST_3PLUS_EPS_DELTA
    assert rep.shortcuts_used == 1
    assert rep.stats["fans_built"] >= 1
    assert rep.stats["grid_points"] > 0


# ----------------------------------------------------------------------
# vertical tunnels
# ----------------------------------------------------------------------

def test_vertical_tunnel_without_tracker():
    assert vertical_tunnel(None, (0, 0), 1.0) == []


def test_vertical_tunnel_tracker_at_zero_covers_cell():
    T = PolygonalCurve([(0, 0), (1, 0)])
    B = PolygonalCurve([(0, 0), (1, 0), (2, 0)])
    cell = cell_free_space(T, B, 0, 1, 0.2, 1e-9)
    gens = vertical_tunnel(SimpleNamespace(x=0.0), (0, 1), 0.2)
    assert len(gens) == 1 and gens[0].x_cap <= 0.0
    for u, v in [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.9, 0.8)]:
        if cell.contains(u, v):
            assert reach_membership(cell, gens, (u, v))


def test_vertical_tunnel_halfway_splits_diagonal_cell():
    T = PolygonalCurve([(0, 0), (1, 0)])
    B = PolygonalCurve([(0, 0), (1, 0)])
    cell = cell_free_space(T, B, 0, 0, 0.2, 1e-9)
    gens = vertical_tunnel(SimpleNamespace(x=0.5), (0, 0), 0.2)
    assert cell.contains(0.7, 0.65) and cell.contains(0.2, 0.2)
    assert reach_membership(cell, gens, (0.7, 0.65))
    assert reach_membership(cell, gens, (0.9, 0.8))
    assert not reach_membership(cell, gens, (0.2, 0.2))


# ----------------------------------------------------------------------
# the approximate diagonal tunnel
# ----------------------------------------------------------------------

def test_fan_detour_out_of_reach_is_empty():
    T = PolygonalCurve([(0, 0), (3, 0), (3, 8), (6, 8)])
    B = PolygonalCurve([(0, 0), (2, 0), (5, 0)])
    # every straight segment from the origin to the lattice around (3,8)
    # misses the corner at (3,0) by far more than the budget allows
    gens = apx_diagonal_tunnel(T, B, (0.0, 0.0), (2, 1), 0.5, 0.5)
    assert gens == []


def test_fan_straight_target_covers_cell():
    T = PolygonalCurve([(0, 0), (2, 0), (4, 0)])
    B = PolygonalCurve([(0, 0), (4, 0)])
    gens = apx_diagonal_tunnel(T, B, (0.5, 0.25), (1, 0), 0.5, 5.0)
    assert len(gens) == 1
    g = gens[0]
    assert (g.y_lo, g.y_hi) == (0.0, 1.0)
    assert math.isinf(g.x_cap) and g.x_cap < 0


def test_fan_price_sandwich():
    """Member points cost at most (1+eps)^2 * budget; cheap points are in.

    The price of a tunnel landing at (x_q, y_q) is the Frechet distance
    between the shortcut segment and the piece of the target walked while
    tunneling, i.e. the subcurve up to the arrival abscissa x_q.
    """
    rng = random.Random(93)
    sound = comp = 0
    for trial in range(25):
        T = rnd_curve(rng, rng.randint(3, 5), span=8.0)
        B = rnd_curve(rng, rng.randint(3, 5), span=8.0)
        delta = rng.uniform(0.8, 2.5)
        eps = (0.25, 0.5, 1.0)[trial % 3]
        budget = 3.0 * delta
        i = rng.randint(1, T.n_edges - 1)
        j = rng.randint(1, B.n_edges - 1)
        i0 = rng.randint(0, i - 1)
        j0 = rng.randint(0, j - 1)
        pad = 1e-9 * bounding_scale(T, B)
        src = cell_free_space(T, B, i0, j0, delta, pad)
        r = None
        for _ in range(60):
            u0, v0 = rng.random(), rng.random()
            if src.contains(u0, v0):
                r = (i0 + u0, j0 + v0)
                break
        if r is None:
            continue
        gens = apx_diagonal_tunnel(T, B, r, (i, j), eps, budget)
        cell = cell_free_space(T, B, i, j, delta, pad)
        thr = (1.0 + eps) ** 2 * budget
        loc_r = CurveLocation(i0, u0)
        start = B.edge_point(j0, v0)
        for _ in range(25):
            u, v = rng.random(), rng.random()
            if not cell.contains(u, v):
                continue
            seg = Segment(start, B.edge_point(j, v))
            price = segment_to_curve_frechet_value(
                seg, subcurve(T, loc_r, CurveLocation(i, u)), 1e-8)
            member = reach_membership(cell, gens, (u, v))
            if member and price > thr + 1e-6:
                sound += 1
            if price <= budget - 1e-6 and not member:
                comp += 1
    assert sound == 0
    assert comp == 0


def test_tunnel_price_of_nested_configurations():
    """Shortcutting inside a delta-matched stretch costs at most 3*delta."""
    rng = random.Random(35)
    for _ in range(80):
        a = (rng.uniform(0, 10), rng.uniform(0, 10))
        b = (rng.uniform(0, 10), rng.uniform(0, 10))
        delta = rng.uniform(0.3, 2.0)
        m = rng.randint(2, 6)
        ts = [0.0] + sorted(rng.random() for _ in range(m - 1)) + [1.0]

        def near(t, rad):
            ang = rng.uniform(0, 2 * math.pi)
            rr = rng.uniform(0, rad)
            return (a[0] + t * (b[0] - a[0]) + rr * math.cos(ang),
                    a[1] + t * (b[1] - a[1]) + rr * math.sin(ang))

        outer = PolygonalCurve([near(t, delta) for t in ts])
        e1 = rng.randint(0, outer.n_edges - 1)
        e2 = rng.randint(e1, outer.n_edges - 1)
        u1 = rng.uniform(0.0, 0.9)
        u2 = rng.uniform(u1 + 0.05, 1.0) if e1 == e2 else rng.random()
        inner = subcurve(outer, CurveLocation(e1, u1), CurveLocation(e2, u2))
        p = near_pt(rng, inner.start(), delta)
        q = near_pt(rng, inner.end(), delta)
        val = segment_to_curve_frechet_value(Segment(p, q), inner, 1e-8)
        assert val <= 3.0 * delta + 1e-6


# ----------------------------------------------------------------------
# sandwich against the exact decider
# ----------------------------------------------------------------------

def test_verdicts_sandwich_the_exact_answer():
    rng = random.Random(71)
    greater = at_most = 0
    for trial in range(120):
        T = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        B = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        k = rng.randint(0, 2)
        delta = rng.uniform(0.5, 10.0)
        eps = (0.25, 0.5, 1.0)[trial % 3]
        verdict = decide_apx(T, B, k, delta, eps)
        at_delta = decide_exact(T, B, k, delta, want_witness=False).reachable
        if verdict == GREATER_THAN_DELTA:
            greater += 1
            assert not at_delta
        else:
            at_most += 1
            assert decide_exact(T, B, k, (3.0 + eps) * delta,
                                want_witness=False).reachable
        if at_delta:
            assert verdict == AT_MOST_3PLUS_EPS_DELTA
    # the corpus must exercise both answers
    assert greater >= 20 and at_most >= 20


def test_at_most_is_stable_under_larger_k():
    rng = random.Random(72)
    for _ in range(25):
        T = rnd_curve(rng, rng.randint(2, 5), span=8.0)
        B = rnd_curve(rng, rng.randint(3, 5), span=8.0)
        delta = rng.uniform(0.5, 4.0)
        if decide_apx(T, B, 1, delta, 0.5) == AT_MOST_3PLUS_EPS_DELTA:
            assert decide_apx(T, B, 2, delta, 0.5) == AT_MOST_3PLUS_EPS_DELTA
