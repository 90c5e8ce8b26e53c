"""Free-space cell geometry and the generator representation of reach."""

import math
import random

import pytest

from shortcut_frechet.geometry import PolygonalCurve
from shortcut_frechet.freespace import (
    ReachGenerator,
    box_hits_free,
    cell_free_space,
    merge_intervals,
    outgoing_intervals,
    project_to_base_edge,
    prune_generators,
    reach_membership,
    reach_witness,
)

NEG_INF = float("-inf")


def diag_cell(delta=0.0):
    """Identical unit edges: the free region is the diagonal x = y."""
    t = PolygonalCurve([(0, 0), (1, 0)])
    b = PolygonalCurve([(0, 0), (1, 0)])
    return cell_free_space(t, b, 0, 0, delta)


def full_cell():
    """delta large enough that the whole unit square is free."""
    t = PolygonalCurve([(0, 0), (1, 0)])
    b = PolygonalCurve([(0, 0), (1, 0)])
    return cell_free_space(t, b, 0, 0, 10.0)


# ----------------------------------------------------------------------
# cell construction
# ----------------------------------------------------------------------

def test_identical_edges_delta_zero_is_diagonal():
    cell = diag_cell()
    for t in (0.0, 0.25, 0.5, 1.0):
        assert cell.contains(t, t)
    assert not cell.contains(0.6, 0.1)
    assert not cell.contains(0.1, 0.6)


def test_far_parallel_edges_empty():
    t = PolygonalCurve([(0, 0), (1, 0)])
    b = PolygonalCurve([(0, 2), (1, 2)])
    cell = cell_free_space(t, b, 0, 0, 1.0)
    assert cell.is_empty()


def test_crossing_edges_center_free():
    t = PolygonalCurve([(0, 0), (2, 0)])
    b = PolygonalCurve([(1, 1), (1, -1)])
    cell = cell_free_space(t, b, 0, 0, 1.0)
    assert cell.contains(0.5, 0.5)


def test_cell_index_validation():
    t = PolygonalCurve([(0, 0), (1, 0)])
    b = PolygonalCurve([(0, 0), (1, 0)])
    with pytest.raises(IndexError):
        cell_free_space(t, b, 1, 0, 1.0)


def test_membership_matches_distance():
    rng = random.Random(5)
    for _ in range(200):
        t = PolygonalCurve([(rng.uniform(0, 5), rng.uniform(0, 5)) for _ in range(2)])
        b = PolygonalCurve([(rng.uniform(0, 5), rng.uniform(0, 5)) for _ in range(2)])
        d = rng.uniform(0.2, 4.0)
        cell = cell_free_space(t, b, 0, 0, d)
        x, y = rng.random(), rng.random()
        px = cell.target_point(x)
        py = cell.base_point(y)
        gap = math.hypot(px[0] - py[0], px[1] - py[1]) - d
        if abs(gap) > 1e-7:
            assert cell.contains(x, y) == (gap < 0)


def test_convexity_of_free_region():
    rng = random.Random(11)
    for _ in range(300):
        t = PolygonalCurve([(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(2)])
        b = PolygonalCurve([(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(2)])
        cell = cell_free_space(t, b, 0, 0, rng.uniform(0.5, 3.0))
        pts = [(rng.random(), rng.random()) for _ in range(20)]
        members = [p for p in pts if cell.contains(*p)]
        for p, q in zip(members, members[1:]):
            assert cell.contains(0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]))


# ----------------------------------------------------------------------
# box queries
# ----------------------------------------------------------------------

def test_box_full_square():
    assert box_hits_free(full_cell(), 0.0, 1.0, 0.0, 1.0)


def test_box_on_empty_cell():
    t = PolygonalCurve([(0, 0), (1, 0)])
    b = PolygonalCurve([(0, 2), (1, 2)])
    cell = cell_free_space(t, b, 0, 0, 1.0)
    assert not box_hits_free(cell, 0.0, 1.0, 0.0, 1.0)


def test_box_against_diagonal():
    cell = diag_cell()
    assert not box_hits_free(cell, 0.6, 1.0, 0.0, 0.4)
    assert box_hits_free(cell, 0.2, 0.8, 0.2, 0.8)


def test_box_inverted_is_false():
    assert not box_hits_free(full_cell(), 0.8, 0.2, 0.0, 1.0)


# ----------------------------------------------------------------------
# reach membership
# ----------------------------------------------------------------------

def test_reach_empty_generators():
    cell = full_cell()
    assert not reach_membership(cell, [], (0.5, 0.5))


def test_reach_point_generator_self():
    cell = full_cell()
    g = ReachGenerator(0.5, 0.5, 0.5)
    assert reach_membership(cell, [g], (0.5, 0.5))
    assert reach_membership(cell, [g], (0.9, 0.7))
    assert not reach_membership(cell, [g], (0.4, 0.6))
    assert not reach_membership(cell, [g], (0.6, 0.4))


def test_reach_slab_on_diagonal():
    cell = diag_cell()
    g = ReachGenerator(0.2, 0.4, NEG_INF)
    assert reach_membership(cell, [g], (0.9, 0.9))
    assert not reach_membership(cell, [g], (0.1, 0.1))


def test_reach_witness_seed_is_member():
    cell = full_cell()
    g = ReachGenerator(0.3, 0.6, 0.25)
    got = reach_witness(cell, [g], (0.8, 0.8))
    assert got is not None
    gen, seed = got
    assert gen is g
    assert cell.contains(seed[0], seed[1])
    assert seed[0] <= 0.8 + 1e-9 and seed[1] <= 0.8 + 1e-9


def test_upward_right_closure():
    rng = random.Random(23)
    for _ in range(200):
        t = PolygonalCurve([(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(2)])
        b = PolygonalCurve([(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(2)])
        cell = cell_free_space(t, b, 0, 0, rng.uniform(0.5, 3.0))
        gens = [ReachGenerator(rng.random() * 0.5, 0.5 + rng.random() * 0.5,
                               rng.random() - 0.5)]
        q = (rng.random(), rng.random())
        if reach_membership(cell, gens, q):
            q2 = (q[0] + (1 - q[0]) * rng.random(), q[1] + (1 - q[1]) * rng.random())
            if cell.contains(*q2):
                assert reach_membership(cell, gens, q2)


# ----------------------------------------------------------------------
# outgoing boundary intervals
# ----------------------------------------------------------------------

def test_outgoing_empty_set():
    right, top = outgoing_intervals(full_cell(), [])
    assert right.is_empty and top.is_empty


def test_outgoing_whole_cell():
    cell = full_cell()
    right, top = outgoing_intervals(cell, [ReachGenerator(0.0, 1.0, NEG_INF)])
    assert not right.is_empty and not top.is_empty
    assert right.lo <= 1e-6 and right.hi >= 1.0 - 1e-6
    assert top.lo <= 1e-6 and top.hi >= 1.0 - 1e-6


def test_outgoing_diagonal_corner_only():
    cell = diag_cell()
    right, top = outgoing_intervals(cell, [ReachGenerator(0.5, 0.5, 0.5)])
    # the only free boundary point up-right of (0.5, 0.5) is the corner
    assert not right.is_empty
    assert right.lo >= 1.0 - 1e-6 and right.hi >= 1.0 - 1e-6


def test_outgoing_endpoints_are_members():
    rng = random.Random(37)
    checked = 0
    for _ in range(120):
        t = PolygonalCurve([(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(2)])
        b = PolygonalCurve([(rng.uniform(0, 4), rng.uniform(0, 4)) for _ in range(2)])
        cell = cell_free_space(t, b, 0, 0, rng.uniform(0.5, 3.0))
        gens = [ReachGenerator(0.0, rng.random(), rng.random() - 0.2)]
        right, top = outgoing_intervals(cell, gens)
        if not right.is_empty:
            mid = 0.5 * (right.lo + right.hi)
            assert reach_membership(cell, gens, (1.0, mid))
            checked += 1
        if not top.is_empty:
            mid = 0.5 * (top.lo + top.hi)
            assert reach_membership(cell, gens, (mid, 1.0))
            checked += 1
    assert checked > 20


# ----------------------------------------------------------------------
# projection onto the base edge
# ----------------------------------------------------------------------

def test_project_full_cell():
    cell = full_cell()
    ivs = project_to_base_edge(cell, [ReachGenerator(0.0, 1.0, NEG_INF)])
    assert len(ivs) == 1
    lo, hi = ivs[0]
    assert lo <= 1e-6 and hi >= 1.0 - 1e-6


def test_project_empty():
    assert project_to_base_edge(full_cell(), []) == []


def test_project_point_generator_upward():
    cell = full_cell()
    ivs = project_to_base_edge(cell, [ReachGenerator(0.35, 0.35, 0.2)])
    assert len(ivs) == 1
    lo, hi = ivs[0]
    assert abs(lo - 0.35) <= 1e-6
    assert hi >= 1.0 - 1e-6


def test_project_respects_free_space():
    # diagonal cell: a generator seeded at height y reaches heights >= y
    cell = diag_cell()
    ivs = project_to_base_edge(cell, [ReachGenerator(0.4, 0.4, NEG_INF)])
    assert len(ivs) == 1
    lo, hi = ivs[0]
    assert abs(lo - 0.4) <= 1e-5
    assert hi >= 1.0 - 1e-5


# ----------------------------------------------------------------------
# generator bookkeeping
# ----------------------------------------------------------------------

def test_prune_dominated():
    big = ReachGenerator(0.1, 0.9, NEG_INF)
    small = ReachGenerator(0.2, 0.8, 0.5)
    kept = prune_generators([small, big])
    assert kept == [big]


def test_prune_keeps_incomparable():
    a = ReachGenerator(0.0, 0.5, 0.5)
    b = ReachGenerator(0.4, 1.0, 0.9)
    assert len(prune_generators([a, b])) == 2


def test_merge_intervals():
    got = merge_intervals([(0.0, 0.3), (0.3, 0.6), (0.8, 0.9)], 1e-9)
    assert got == [(0.0, 0.6), (0.8, 0.9)]
