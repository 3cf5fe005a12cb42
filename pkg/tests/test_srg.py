import math
import random

import pytest

from sigeval.assignment import match_scene
from sigeval.attention import AttentionGrid
from sigeval.errors import DegenerateDMaxError
from sigeval.scene import align_ego
from sigeval.srg import (GedCosts, build_srg, direction_bin, edge_edit_distance, graph_matching, max_distance,
                         node_edit_distance, similarity, srgs)
from sigeval.synth import perturb, random_scene

from conftest import scene, sign, veh

# unit vectors of the eight labels: back, back-left, left, front-left, front, front-right, right, back-right
_DIRS = [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]


def bin_oracle(dx, dy):
    """Label whose direction has the largest cosine with (dx, dy); ties to the smaller index."""
    n = math.hypot(dx, dy)
    cos = [(dx * ux + dy * uy) / (n * math.hypot(ux, uy)) for ux, uy in _DIRS]
    best = max(cos)
    return min(k for k, c in enumerate(cos) if c >= best - 1e-12)


def test_direction_bins_all_integer_vectors():
    for dx in range(-9, 10):
        for dy in range(-9, 10):
            if dx or dy:
                assert direction_bin(dx, dy) == bin_oracle(dx, dy), (dx, dy)
    assert direction_bin(0, 0) is None


def test_sector_centres():
    for k, (ux, uy) in enumerate(_DIRS):
        assert direction_bin(ux * 3, uy * 3) == k


def test_two_object_edges():
    g = build_srg(scene(veh(1, 5, 3), veh(2, 5, 5)))
    assert g.bin[0][1] == 0  # A - B = (0, -2): back
    assert g.bin[1][0] == 4  # front
    assert g.length[0][1] == 2.0


def test_graph_sizes():
    g = build_srg(scene(sign(1, 1, 1)))
    assert (g.n_nodes, g.n_edges) == (2, 2)
    g = build_srg(scene())
    assert (g.n_nodes, g.n_edges) == (1, 0)
    assert g.nodes[-1].name == "self"


def _parts(pred, gt, costs=GedCosts()):
    aligned = align_ego(pred, gt)
    gm = graph_matching(match_scene(aligned, gt))
    g, p = build_srg(gt), build_srg(aligned)
    return g, p, gm


def test_node_distance_examples():
    s = scene(veh(1, 1, 1), sign(1, 4, 4))
    g, p, m = _parts(s, s)
    assert node_edit_distance(g, p, m) == 0
    assert edge_edit_distance(g, p, m) == 0

    gt = scene(veh(1, 1, 1), veh(2, 4, 4), sign(1, 7, 7))
    g, p, m = _parts(scene(), gt)
    assert node_edit_distance(g, p, m) == 3 * 5.0

    gt = scene(veh(1, 1, 1, "red"))
    pred = scene(veh(1, 1, 2, "blue"))
    g, p, m = _parts(pred, gt)
    assert node_edit_distance(g, p, m) == 3.0


def test_edge_length_difference():
    gt = scene(sign(1, 4, 2), ego=(4, 0))
    pred = scene(sign(1, 4, 3), ego=(4, 0))
    g, p, m = _parts(pred, gt)
    assert edge_edit_distance(g, p, m) == 2.0


def test_pure_insertion_closed_form():
    gt = scene(veh(1, 1, 1), veh(2, 4, 4), sign(1, 7, 7))
    r = srgs(scene(), gt)
    # 3 node insertions; edges: gt has 4*3 = 12, of which the 12 touching a non-ego node are unmatched
    assert r.d_node == 15.0 and r.d_edge == 24.0
    assert r.d_max == 5 * 4 + 5 * 1 + 2 * 12
    assert r.s == pytest.approx(1 - 39 / 49, abs=1e-15)
    assert r.ws == pytest.approx(1 - (15 + 0.5 * 24) / (25 + 0.5 * 24), abs=1e-15)


def _naive_ged(gt, pred, costs=GedCosts()):
    """Sum every edit cost directly from the scenes and the node matching."""
    aligned = align_ego(pred, gt)
    gm = graph_matching(match_scene(aligned, gt))
    gn = gt.metric_objects() + (gt.ego_object,)
    pn = aligned.metric_objects() + (aligned.ego_object,)
    m = {g: p for g, p, _ in gm.pairs}
    terms = []
    for g, p in m.items():
        a, b = gn[g], pn[p]
        terms.append(math.dist(a.pos, b.pos) + (costs.lambda_node if (a.color, a.kind, a.order) != (b.color, b.kind, b.order) else 0))
    terms += [costs.eta_node_ins] * (len(gn) - len(m))
    terms += [costs.eta_node_del] * (len(pn) - len(m))
    used = set()
    for i in range(len(gn)):
        for j in range(len(gn)):
            if i == j:
                continue
            if i in m and j in m:
                di = (gn[i].x - gn[j].x, gn[i].y - gn[j].y)
                dp = (pn[m[i]].x - pn[m[j]].x, pn[m[i]].y - pn[m[j]].y)
                bi = bin_oracle(*di) if any(di) else None
                bp = bin_oracle(*dp) if any(dp) else None
                terms.append(abs(math.hypot(*di) - math.hypot(*dp)) + (costs.lambda_edge if bi != bp else 0))
                used.add((m[i], m[j]))
            else:
                terms.append(costs.eta_edge_ins)
    n_pred_edges = len(pn) * (len(pn) - 1)
    terms += [costs.eta_edge_del] * (n_pred_edges - len(used))
    return math.fsum(terms)


def test_ged_against_naive_sum(rng):
    for _ in range(200):
        gt = random_scene(rng, max_objects=5)
        pred = perturb(gt, rng)
        assert srgs(pred, gt).d_total == _naive_ged(gt, pred)


def test_similarity_edge_cases():
    assert similarity(0.0, 0.0) == 1.0
    with pytest.raises(DegenerateDMaxError):
        similarity(1.0, 0.0)
    assert similarity(100.0, 10.0) == 0.0


def test_costs_validated():
    with pytest.raises(ValueError):
        GedCosts(lambda_node=-1)
    with pytest.raises(ValueError):
        GedCosts(gamma=0, beta=0)


def test_identity_and_constant_attention(rng):
    for _ in range(50):
        gt = random_scene(rng)
        pred = perturb(gt, rng)
        assert srgs(gt, gt).s == 1.0 and srgs(gt, gt).ws == 1.0
        c = rng.uniform(0.05, 1.0)
        base = srgs(pred, gt)
        hl = srgs(pred, gt, weights=AttentionGrid.uniform(c))
        assert abs(hl.s - base.s) < 1e-12 and abs(hl.ws - base.ws) < 1e-12


def test_weighted_terms_scale_with_attention():
    gt = scene(sign(1, 2, 2), ego=(0, 0))
    grid = AttentionGrid.uniform(1.0)
    grid.values[2, 2] = 0.0
    r = srgs(scene(ego=(0, 0)), gt, weights=grid)
    # the only missing node carries zero attention; its edges carry half weight
    assert r.d_node == 0.0
    assert r.d_edge == 2 * 2 * 0.5


def test_max_distance_weighted_unit_matches_unweighted():
    gt = build_srg(scene(veh(1, 1, 1), sign(1, 2, 2)))
    pred = build_srg(scene(veh(1, 3, 3)))
    c = GedCosts()
    plain = max_distance(gt, pred, c, 1, 1)
    w = max_distance(gt, pred, c, 1, 1, [1.0] * gt.n_nodes, [1.0] * pred.n_nodes)
    assert plain == w
