"""Tests for the curve primitives and the baseline Frechet machinery."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from shortcut_frechet.geometry import (
    CurveLocation,
    PolygonalCurve,
    Segment,
    apply_shortcuts,
    curve_frechet_decide,
    point_at,
    segment_frechet,
    segment_to_curve_frechet_decide,
    segment_to_curve_frechet_value,
    subcurve,
)


def close(p, q, tol=1e-12):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


# ----------------------------------------------------------------------
# locations and subcurves
# ----------------------------------------------------------------------

def test_point_at_midpoint():
    c = PolygonalCurve([(0, 0), (2, 0)])
    assert close(point_at(c, CurveLocation(0, 0.5)), (1.0, 0.0))


def test_point_at_vertices():
    c = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    assert close(point_at(c, CurveLocation(1, 0.0)), (1.0, 1.0))
    assert close(point_at(c, CurveLocation(1, 1.0)), (2.0, 0.0))


def test_point_at_bad_edge():
    c = PolygonalCurve([(0, 0), (1, 0)])
    with pytest.raises((IndexError, ValueError)):
        point_at(c, CurveLocation(3, 0.0))


def test_subcurve_interior():
    c = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    s = subcurve(c, CurveLocation(0, 0.5), CurveLocation(1, 0.5))
    want = [(0.5, 0.5), (1.0, 1.0), (1.5, 0.5)]
    assert s.n_vertices == 3
    for got, exp in zip(s.vertices(), want):
        assert close(got, exp)


def test_subcurve_degenerate_point():
    c = PolygonalCurve([(0, 0), (4, 0)])
    s = subcurve(c, CurveLocation(0, 0.25), CurveLocation(0, 0.25))
    assert close(s.start(), (1.0, 0.0))
    assert close(s.end(), (1.0, 0.0))


def test_subcurve_full_range():
    c = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    s = subcurve(c, CurveLocation(0, 0.0), CurveLocation(1, 1.0))
    assert [tuple(v) for v in s.vertices()] == [tuple(v) for v in c.vertices()]


def test_subcurve_order_error():
    c = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    with pytest.raises(ValueError):
        subcurve(c, CurveLocation(1, 0.5), CurveLocation(0, 0.5))


def test_duplicate_vertices_collapse():
    c = PolygonalCurve([(0, 0), (0, 0), (1, 0), (1, 0), (2, 0)])
    assert c.n_vertices == 3


# ----------------------------------------------------------------------
# segment distances
# ----------------------------------------------------------------------

def test_segment_frechet_parallel():
    assert segment_frechet(Segment((0, 0), (2, 0)), Segment((0, 1), (2, 1))) == 1.0


def test_segment_frechet_identical():
    s = Segment((3, 4), (5, 6))
    assert segment_frechet(s, s) == 0.0


def test_segment_frechet_mixed():
    got = segment_frechet(Segment((0, 0), (1, 0)), Segment((0, 3), (1, 4)))
    assert got == 4.0


@given(st.lists(st.floats(-50, 50), min_size=12, max_size=12))
def test_segment_frechet_metric(coords):
    a = Segment((coords[0], coords[1]), (coords[2], coords[3]))
    b = Segment((coords[4], coords[5]), (coords[6], coords[7]))
    c = Segment((coords[8], coords[9]), (coords[10], coords[11]))
    dab = segment_frechet(a, b)
    assert dab == segment_frechet(b, a)
    assert dab <= segment_frechet(a, c) + segment_frechet(c, b) + 1e-9


# ----------------------------------------------------------------------
# segment-to-curve Frechet
# ----------------------------------------------------------------------

def test_seg_curve_decide_tent():
    seg = Segment((0, 0), (2, 0))
    tent = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    assert segment_to_curve_frechet_decide(seg, tent, 1.0)
    assert not segment_to_curve_frechet_decide(seg, tent, 0.5)


def test_seg_curve_decide_negative_delta():
    seg = Segment((0, 0), (1, 0))
    c = PolygonalCurve([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        segment_to_curve_frechet_decide(seg, c, -0.1)


def test_seg_curve_value_tent():
    seg = Segment((0, 0), (2, 0))
    tent = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    v = segment_to_curve_frechet_value(seg, tent, 1e-9)
    assert abs(v - 1.0) <= 1e-9


def test_seg_curve_value_matches_segment_case():
    seg = Segment((0, 0), (2, 0))
    c = PolygonalCurve([(0, 0), (2, 0)])
    assert segment_to_curve_frechet_value(seg, c, 1e-9) <= 1e-9


def test_seg_curve_value_doubleback():
    # curve leaves and returns; the answer is the far vertex distance
    seg = Segment((0, 0), (0, 0))
    c = PolygonalCurve([(0, 0), (3, 4), (0, 0)])
    v = segment_to_curve_frechet_value(seg, c, 1e-9)
    assert abs(v - 5.0) <= 1e-8


def test_seg_curve_value_bad_tol():
    with pytest.raises(ValueError):
        segment_to_curve_frechet_value(
            Segment((0, 0), (1, 0)), PolygonalCurve([(0, 0), (1, 0)]), 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_seg_curve_decide_value_consistent(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    c = PolygonalCurve([(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n)])
    seg = Segment((rng.uniform(0, 10), rng.uniform(0, 10)),
                  (rng.uniform(0, 10), rng.uniform(0, 10)))
    tol = 1e-7
    v = segment_to_curve_frechet_value(seg, c, tol)
    assert segment_to_curve_frechet_decide(seg, c, v + 2 * tol)
    if v - 2 * tol > max(
            math.hypot(seg[0][0] - c.start()[0], seg[0][1] - c.start()[1]),
            math.hypot(seg[1][0] - c.end()[0], seg[1][1] - c.end()[1])):
        assert not segment_to_curve_frechet_decide(seg, c, v - 2 * tol)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.1, 5.0), st.floats(1.01, 3.0))
def test_seg_curve_decide_monotone(seed, delta, factor):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    c = PolygonalCurve([(rng.uniform(0, 6), rng.uniform(0, 6)) for _ in range(n)])
    seg = Segment((rng.uniform(0, 6), rng.uniform(0, 6)),
                  (rng.uniform(0, 6), rng.uniform(0, 6)))
    if segment_to_curve_frechet_decide(seg, c, delta):
        assert segment_to_curve_frechet_decide(seg, c, delta * factor)


# ----------------------------------------------------------------------
# curve-to-curve decision
# ----------------------------------------------------------------------

def test_curve_decide_identical():
    c = PolygonalCurve([(0, 0), (1, 2), (3, 1)])
    assert curve_frechet_decide(c, c, 0.0)


def test_curve_decide_parallel_translate():
    a = PolygonalCurve([(0, 0), (2, 0)])
    b = PolygonalCurve([(0, 1), (2, 1)])
    assert not curve_frechet_decide(a, b, 0.999)
    assert curve_frechet_decide(a, b, 1.0)


def test_curve_decide_tent_vs_base():
    a = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    b = PolygonalCurve([(0, 0), (2, 0)])
    assert curve_frechet_decide(a, b, 1.0)
    assert not curve_frechet_decide(a, b, 0.9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_curve_decide_self_zero(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    c = PolygonalCurve([(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(n)])
    assert curve_frechet_decide(c, c, 0.0)


# ----------------------------------------------------------------------
# shortcut application
# ----------------------------------------------------------------------

def test_apply_shortcuts_single():
    b = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    out = apply_shortcuts(b, [(CurveLocation(0, 0.0), CurveLocation(1, 1.0))])
    assert [tuple(v) for v in out.vertices()] == [(0.0, 0.0), (2.0, 0.0)]


def test_apply_shortcuts_keeps_outside_pieces():
    b = PolygonalCurve([(0, 0), (2, 0), (4, 0), (6, 0)])
    out = apply_shortcuts(b, [(CurveLocation(0, 0.5), CurveLocation(2, 0.5))])
    xs = [v[0] for v in out.vertices()]
    assert xs[0] == 0.0 and xs[-1] == 6.0
    assert 1.0 in xs and 5.0 in xs


def test_apply_shortcuts_rejects_disorder():
    b = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    with pytest.raises(ValueError):
        apply_shortcuts(b, [(CurveLocation(1, 0.5), CurveLocation(0, 0.5))])
