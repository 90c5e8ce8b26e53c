"""Sanity checks for the brute-force oracles themselves."""

import random

import pytest

from shortcut_frechet.geometry import PolygonalCurve
from shortcut_frechet.decider_exact import decide_exact
from shortcut_frechet.testkit import (
    DenseSampling,
    brute_shortcut_decide,
    brute_shortcut_search,
    discrete_frechet,
)


def test_discrete_frechet_identical():
    c = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    s = DenseSampling(c, 200)
    assert discrete_frechet(s, s) == 0.0


def test_discrete_frechet_parallel_offset():
    a = DenseSampling(PolygonalCurve([(0, 0), (2, 0)]), 300)
    b = DenseSampling(PolygonalCurve([(0, 1), (2, 1)]), 300)
    assert abs(discrete_frechet(a, b) - 1.0) <= 1e-9


def test_discrete_frechet_tent():
    m = 1000
    a = DenseSampling(PolygonalCurve([(0, 0), (1, 1), (2, 0)]), m)
    b = DenseSampling(PolygonalCurve([(0, 0), (2, 0)]), m)
    got = discrete_frechet(a, b)
    assert abs(got - 1.0) <= 4.0 / m * 2.5


def test_sampling_needs_two_points():
    with pytest.raises(ValueError):
        DenseSampling(PolygonalCurve([(0, 0), (1, 0)]), 1)


def test_brute_decide_trivial():
    c = PolygonalCurve([(0, 0), (1, 0), (2, 1)])
    assert brute_shortcut_decide(c, c, 0, 0.0, grid_m=3)


def test_brute_decide_zigzag_shortcut():
    T = PolygonalCurve([(0, 0), (2, 0)])
    B = PolygonalCurve([(0, 0), (1, 1), (2, 0)])
    assert brute_shortcut_decide(T, B, 1, 0.1, grid_m=5)


def test_brute_budget_guard():
    B = PolygonalCurve([(i, i % 2) for i in range(40)])
    T = PolygonalCurve([(0, 0), (40, 0)])
    with pytest.raises(ValueError):
        brute_shortcut_search(T, B, 3, grid_m=40, budget=1000)


def test_brute_upper_bound_is_sound():
    rng = random.Random(63)
    for _ in range(4):
        T = PolygonalCurve([(rng.uniform(0, 6), rng.uniform(0, 6))
                            for _ in range(rng.randint(2, 4))])
        B = PolygonalCurve([(rng.uniform(0, 6), rng.uniform(0, 6))
                            for _ in range(rng.randint(3, 4))])
        res = brute_shortcut_search(T, B, 1, grid_m=4)
        # the certified upper bound must be accepted by the exact decider
        assert decide_exact(T, B, 1, res.upper_bound + 1e-6,
                            want_witness=False).reachable


def test_brute_true_implies_exact_true():
    rng = random.Random(64)
    for _ in range(4):
        T = PolygonalCurve([(rng.uniform(0, 6), rng.uniform(0, 6))
                            for _ in range(rng.randint(2, 4))])
        B = PolygonalCurve([(rng.uniform(0, 6), rng.uniform(0, 6))
                            for _ in range(rng.randint(3, 4))])
        d = rng.uniform(0.5, 5.0)
        res = brute_shortcut_search(T, B, 1, grid_m=4)
        if res.passed_margin <= d:
            assert decide_exact(T, B, 1, d + 2 * res.slack,
                                want_witness=False).reachable
