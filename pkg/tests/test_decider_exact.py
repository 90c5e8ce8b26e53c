"""The exact shortcut decider: rounds, tunnels, witnesses."""

import random

from shortcut_frechet.geometry import PolygonalCurve, curve_frechet_decide
from shortcut_frechet.decider_exact import (
    ExactState,
    certify_witness,
    decide_exact,
    decide_shortcut_unbounded,
)

ZIG_BASE = [(0, 0), (1, 1), (2, 0)]
ZIG_TARGET = [(0, 0), (2, 0)]


def rnd_curve(rng, n, span=10.0):
    return PolygonalCurve([(rng.uniform(0, span), rng.uniform(0, span))
                           for _ in range(n)])


# ----------------------------------------------------------------------
# the worked example
# ----------------------------------------------------------------------

def test_zigzag_without_shortcuts():
    T = PolygonalCurve(ZIG_TARGET)
    B = PolygonalCurve(ZIG_BASE)
    assert decide_exact(T, B, 0, 1.0, want_witness=False).reachable
    assert not decide_exact(T, B, 0, 0.9, want_witness=False).reachable


def test_zigzag_one_shortcut_kills_the_detour():
    T = PolygonalCurve(ZIG_TARGET)
    B = PolygonalCurve(ZIG_BASE)
    res = decide_exact(T, B, 1, 0.1)
    assert res.reachable
    assert res.shortcuts_used == 1
    assert len(res.tunnels) == 1
    tn = res.tunnels[0]
    # a proper tunnel spans distinct base edges
    assert tn.b_from[0] < tn.b_to[0]
    assert certify_witness(T, B, 0.1, res.tunnels)


def test_zigzag_round_zero_is_remembered():
    T = PolygonalCurve(ZIG_TARGET)
    B = PolygonalCurve(ZIG_BASE)
    res = decide_exact(T, B, 3, 1.0)
    assert res.reachable
    assert res.shortcuts_used == 0
    assert res.tunnels == []


def test_identical_curves():
    c = PolygonalCurve([(0, 0), (3, 1), (5, 0)])
    assert decide_exact(c, c, 0, 0.0, want_witness=False).reachable
    assert decide_exact(c, c, 2, 0.0, want_witness=False).reachable


def test_translated_far_apart():
    a = PolygonalCurve([(0, 0), (1, 0)])
    b = PolygonalCurve([(0, 10), (1, 10), (2, 10)])
    assert not decide_exact(a, b, 2, 1.0, want_witness=False).reachable


def test_parameter_validation():
    c = PolygonalCurve([(0, 0), (1, 0)])
    import pytest
    with pytest.raises(ValueError):
        decide_exact(c, c, -1, 1.0)
    with pytest.raises(ValueError):
        decide_exact(c, c, 0, -0.5)


# ----------------------------------------------------------------------
# agreement with the classical decision at k = 0
# ----------------------------------------------------------------------

def test_k0_matches_classical():
    rng = random.Random(101)
    for _ in range(60):
        T = rnd_curve(rng, rng.randint(2, 8))
        B = rnd_curve(rng, rng.randint(2, 8))
        d = rng.uniform(0.5, 12.0)
        assert (curve_frechet_decide(T, B, d)
                == decide_exact(T, B, 0, d, want_witness=False).reachable)


# ----------------------------------------------------------------------
# monotonicity
# ----------------------------------------------------------------------

def test_monotone_in_k():
    rng = random.Random(55)
    for _ in range(25):
        T = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        B = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        d = rng.uniform(0.5, 8.0)
        prev = False
        for k in range(4):
            cur = decide_exact(T, B, k, d, want_witness=False).reachable
            if prev:
                assert cur
            prev = cur


def test_monotone_in_delta():
    rng = random.Random(56)
    for _ in range(25):
        T = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        B = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        d = rng.uniform(0.5, 6.0)
        if decide_exact(T, B, 1, d, want_witness=False).reachable:
            assert decide_exact(T, B, 1, d * 1.3, want_witness=False).reachable


def test_unbounded_subsumes_bounded():
    rng = random.Random(57)
    for _ in range(15):
        T = rnd_curve(rng, rng.randint(2, 5), span=8.0)
        B = rnd_curve(rng, rng.randint(3, 5), span=8.0)
        d = rng.uniform(1.0, 8.0)
        if decide_exact(T, B, 2, d, want_witness=False).reachable:
            assert decide_shortcut_unbounded(T, B, d).reachable


# ----------------------------------------------------------------------
# witnesses certify
# ----------------------------------------------------------------------

def test_witnesses_certify_on_random_yes_instances():
    rng = random.Random(77)
    yes_seen = 0
    for _ in range(30):
        T = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        B = rnd_curve(rng, rng.randint(2, 6), span=8.0)
        k = rng.randint(0, 2)
        d = rng.uniform(1.0, 9.0)
        res = decide_exact(T, B, k, d)
        if res.reachable:
            yes_seen += 1
            assert res.shortcuts_used <= k
            assert len(res.tunnels) == res.shortcuts_used
            assert certify_witness(T, B, d, res.tunnels)
    assert yes_seen >= 5


def test_tunnels_are_ordered_and_proper():
    rng = random.Random(78)
    for _ in range(25):
        T = rnd_curve(rng, rng.randint(3, 6), span=8.0)
        B = rnd_curve(rng, rng.randint(3, 6), span=8.0)
        res = decide_exact(T, B, 2, rng.uniform(1.0, 6.0))
        if not res.reachable:
            continue
        prev_b = -1.0
        for tn in res.tunnels:
            assert tn.b_from[0] < tn.b_to[0]
            assert tn.b_from[0] + tn.b_from[1] >= prev_b - 1e-9
            prev_b = tn.b_to[0] + tn.b_to[1]


# ----------------------------------------------------------------------
# state internals exercised directly
# ----------------------------------------------------------------------

def test_rounds_accumulate():
    T = PolygonalCurve(ZIG_TARGET)
    B = PolygonalCurve(ZIG_BASE)
    st = ExactState(T, B, 0.1)
    st.run_round(0)
    assert not st.corner_reached(0)
    st.run_round(1)
    assert st.corner_reached(1)


def test_stats_exposed():
    T = PolygonalCurve(ZIG_TARGET)
    B = PolygonalCurve(ZIG_BASE)
    res = decide_exact(T, B, 1, 0.1, want_witness=False)
    assert res.stats["rounds_run"] >= 2
    assert res.stats["cells"] == T.n_edges * B.n_edges
    assert len(res.stats["generators_per_round"]) == res.stats["rounds_run"]
