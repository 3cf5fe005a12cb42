import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigeval.assignment import (MatchWeights, cost_matrix, match_scene, oracle_assignment, sign_light_cost,
                                solve_assignment, vehicle_cost)
from sigeval.errors import NonFiniteCostError, TooLargeError

from conftest import scene, sign, veh


def test_vehicle_cost_examples():
    g = veh(1, 0, 0, "red", "car")
    assert vehicle_cost(g, veh(1, 0, 2, "red", "car")) == 0.25
    assert vehicle_cost(g, veh(2, 0, 2, "blue", "bus")) == 2.0
    assert vehicle_cost(g, veh(3, 0, 0, "blue", "van")) == 0.0
    assert vehicle_cost(g, veh(2, 0, 2, "red", "bus")) == 1.0


def test_sign_cost_examples():
    g = sign(1, 0, 0)
    assert sign_light_cost(g, sign(1, 3, 0)) == 1.5
    assert sign_light_cost(g, sign(2, 3, 0)) == 3.0
    assert sign_light_cost(g, sign(2, 0, 0)) == 0.0


def test_weights_validated():
    with pytest.raises(ValueError):
        MatchWeights(omega_color=0)
    with pytest.raises(ValueError):
        MatchWeights(omega_kind=1.5)


def test_small_examples():
    m = solve_assignment([[1, 2], [2, 1]])
    assert [(g, p) for g, p, _ in m.pairs] == [(0, 0), (1, 1)] and m.total == 2
    m = solve_assignment([[5, 1, 7]])
    assert [(g, p) for g, p, _ in m.pairs] == [(0, 1)] and m.unmatched_pred == (0, 2)
    m = solve_assignment(np.zeros((0, 0)))
    assert m.pairs == () and m.unmatched_gt == () and m.unmatched_pred == ()
    assert oracle_assignment([[1, 2], [2, 1]]).total == 2
    assert oracle_assignment(np.zeros((0, 0))).pairs == ()


def test_tall_matrix():
    m = solve_assignment([[3], [1], [2]])
    assert [(g, p) for g, p, _ in m.pairs] == [(1, 0)] and m.unmatched_gt == (0, 2)


def test_ties_resolve_lexicographically():
    m = solve_assignment(np.ones((3, 3)))
    assert [(g, p) for g, p, _ in m.pairs] == [(0, 0), (1, 1), (2, 2)]
    m = solve_assignment([[0, 0, 5], [0, 0, 5]])
    assert [(g, p) for g, p, _ in m.pairs] == [(0, 0), (1, 1)]


def test_rejects_bad_input():
    with pytest.raises(NonFiniteCostError):
        solve_assignment([[1, math.nan]])
    with pytest.raises(NonFiniteCostError):
        solve_assignment([[1, math.inf]])
    with pytest.raises(ValueError):
        solve_assignment([1, 2, 3])
    with pytest.raises(TooLargeError):
        oracle_assignment(np.zeros((9, 9)))


def _brute(a):
    """Second, deliberately naive oracle: enumerate assignments of the smaller side."""
    a = np.asarray(a, dtype=float)
    r, c = a.shape
    if r <= c:
        return min(math.fsum(a[i, p[i]] for i in range(r)) for p in itertools.permutations(range(c), r))
    return min(math.fsum(a[p[j], j] for j in range(c)) for p in itertools.permutations(range(r), c))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**31), st.booleans())
def test_solver_matches_enumeration(r, c, seed, ints):
    g = np.random.default_rng(seed)
    a = g.integers(0, 4, (r, c)).astype(float) if ints else g.random((r, c)) * 10
    m = solve_assignment(a)
    o = oracle_assignment(a)
    assert m.total == o.total == _brute(a)
    assert [(i, j) for i, j, _ in m.pairs] == [(i, j) for i, j, _ in o.pairs]
    assert len(m.pairs) == min(r, c)


def test_match_scene_identity():
    s = scene(veh(1, 2, 2), veh(2, 7, 2, "red", "bus"), sign(1, 3, 3))
    ms = match_scene(s, s)
    for cm in ms.values():
        assert all(g == p and c == 0 for g, p, c in cm.matching.pairs)
        assert not cm.matching.unmatched_gt and not cm.matching.unmatched_pred


def test_match_scene_missing_pred():
    gt = scene(veh(1, 2, 2), veh(2, 7, 2))
    ms = match_scene(scene(), gt)
    assert ms["vehicles"].matching.unmatched_gt == (0, 1)


def test_match_scene_against_oracle():
    gt = scene(veh(1, 2, 2, "red", "car"), veh(2, 7, 2, "blue", "bus"))
    pred = scene(veh(1, 7, 2, "red", "car"))
    m = match_scene(pred, gt)["vehicles"].matching
    a = cost_matrix(gt.vehicles, pred.vehicles, True)
    o = oracle_assignment(a)
    assert m.total == o.total
    assert [(g, p) for g, p, _ in m.pairs] == [(g, p) for g, p, _ in o.pairs]
    # cost 5*0.125 for the attribute twin vs 0 for the co-located bus
    assert [(g, p) for g, p, _ in m.pairs] == [(1, 0)]


def test_categories_never_mix():
    gt = scene(sign(1, 1, 1))
    pred = scene(veh(1, 1, 1))
    ms = match_scene(pred, gt)
    assert ms["signs"].matching.unmatched_gt == (0,)
    assert ms["vehicles"].matching.unmatched_pred == (0,)


def test_random_rectangular_vs_oracle():
    rng = random.Random(7)
    for _ in range(300):
        r, c = rng.randint(0, 7), rng.randint(0, 7)
        a = [[rng.choice([0.0, 0.5, 1.0, 1.5, rng.random()]) for _ in range(c)] for _ in range(r)]
        a = np.array(a).reshape(r, c)
        assert solve_assignment(a).total == oracle_assignment(a).total
