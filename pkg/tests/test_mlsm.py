import itertools
import math
import random

import pytest

from sigeval.assignment import match_scene, vehicle_cost, sign_light_cost
from sigeval.mlsm import MlsmConfig, VEHICLE_LEVELS, classify_pairs, mlsm_scores
from sigeval.scene import align_ego
from sigeval.synth import perturb, random_scene

from conftest import light, scene, sign, veh

ATTRS = {"vehicles": VEHICLE_LEVELS, "signs": (("order",),), "lights": (("order",),)}


def _oracle(pred, gt, thresholds=(1, 2, 3, 4, 5)):
    """Independent re-derivation: enumerate every injection per category,
    keep the cheapest, then count TPs per level and threshold by hand."""
    pred = pred.translated(gt.ego[0] - pred.ego[0], gt.ego[1] - pred.ego[1])
    cats = {}
    for cat in ("vehicles", "signs", "lights"):
        g, p = gt.by_category(cat), pred.by_category(cat)
        fn = vehicle_cost if cat == "vehicles" else sign_light_cost
        best, best_pairs = None, ()
        if len(g) <= len(p):
            cands = (tuple(zip(range(len(g)), perm)) for perm in itertools.permutations(range(len(p)), len(g)))
        else:
            cands = (tuple(sorted(zip(perm, range(len(p))))) for perm in itertools.permutations(range(len(g)), len(p)))
        for pairs in cands:
            tot = math.fsum(fn(g[i], p[j]) for i, j in pairs)
            if best is None or tot < best:
                best, best_pairs = tot, pairs
        levels = []
        for lv in ATTRS[cat]:
            ps, rs, aas = [], [], []
            for a in thresholds:
                tp = sum(1 for i, j in best_pairs
                         if math.dist(g[i].pos, p[j].pos) <= a and all(getattr(g[i], k) == getattr(p[j], k) for k in lv))
                fp, fn_ = len(p) - tp, len(g) - tp
                empty = not g and not p
                ps.append(1.0 if empty else (tp / (tp + fp) if tp + fp else 0.0))
                rs.append(1.0 if empty else (tp / (tp + fn_) if tp + fn_ else 0.0))
                aas.append(1.0 if empty else (tp / (tp + fp + fn_) if tp + fp + fn_ else 0.0))
            P, R = sum(ps) / len(ps), sum(rs) / len(rs)
            levels.append((P, R, 0.0 if P + R == 0 else 2 * P * R / (P + R), sum(aas) / len(aas)))
        cats[cat] = (len(g), len(p), [sum(x[k] for x in levels) / len(levels) for k in range(4)])
    w = {c: v[0] for c, v in cats.items()}
    if not any(w.values()):
        w = {c: v[1] for c, v in cats.items()}
    tot = sum(w.values())
    if tot == 0:
        return [1.0] * 4
    return [sum(w[c] * cats[c][2][k] for c in cats) / tot for k in range(4)]


def test_identity():
    s = scene(veh(1, 1, 1), veh(2, 5, 5, "red", "bus"), sign(1, 2, 8), light(1, 9, 9))
    r = mlsm_scores(s, s)
    assert (r.p, r.r, r.f1, r.assa) == (1, 1, 1, 1)
    for lv in r.levels:
        assert lv.p_alpha == lv.r_alpha == lv.assa_alpha == (1.0,) * 5


def test_threshold_excludes_far_pair():
    gt = scene(sign(1, 0, 0))
    pred = scene(sign(1, 1, 1))  # distance sqrt(2) ~ 1.41
    cm = match_scene(pred, gt)["signs"]
    assert classify_pairs(cm, ("order",), 1.0) == (0, 1, 1)
    assert classify_pairs(cm, ("order",), 2.0) == (1, 0, 0)


def test_attribute_mismatch_fails_level():
    gt = scene(veh(1, 0, 0, "red", "car"))
    pred = scene(veh(2, 0, 1, "red", "car"))
    cm = match_scene(pred, gt)["vehicles"]
    assert classify_pairs(cm, ("kind",), 1.0) == (1, 0, 0)
    assert classify_pairs(cm, ("kind", "order"), 1.0) == (0, 1, 1)


def test_empty_prediction():
    gt = scene(veh(1, 1, 1), veh(2, 3, 3))
    r = mlsm_scores(scene(), gt)
    assert (r.p, r.r, r.f1, r.assa) == (0, 0, 0, 0)


def test_both_empty_scores_one():
    r = mlsm_scores(scene(), scene())
    assert (r.p, r.r, r.f1, r.assa) == (1, 1, 1, 1)


def test_displaced_vehicle_hand_values():
    gt = scene(veh(1, 0, 5), veh(2, 4, 5), veh(3, 8, 5))
    pred = scene(veh(1, 0, 5), veh(2, 6, 6), veh(3, 8, 5))  # middle one moved by sqrt(5) ~ 2.24
    r = mlsm_scores(pred, gt)
    assert r.p == pytest.approx(13 / 15, abs=1e-15)
    assert r.r == pytest.approx(13 / 15, abs=1e-15)
    assert r.assa == pytest.approx(0.8, abs=1e-15)
    assert [r.p, r.r, r.f1, r.assa] == pytest.approx(_oracle(pred, gt), abs=1e-12)


def test_against_enumeration_oracle(rng):
    for _ in range(150):
        gt = random_scene(rng, max_objects=6)
        pred = perturb(gt, rng)
        r = mlsm_scores(pred, gt)
        assert [r.p, r.r, r.f1, r.assa] == pytest.approx(_oracle(pred, gt), abs=1e-12)


def test_uniform_aggregation():
    gt = scene(veh(1, 0, 0), veh(2, 5, 5), sign(1, 3, 3))
    pred = scene(veh(1, 0, 0), veh(2, 5, 5))
    weighted = mlsm_scores(pred, gt)
    uniform = mlsm_scores(pred, gt, MlsmConfig(aggregation="uniform"))
    assert weighted.r == pytest.approx(2 / 3)
    assert uniform.r == pytest.approx(0.5)


def test_config_validation():
    with pytest.raises(ValueError):
        MlsmConfig(thresholds=(2.0, 1.0))
    with pytest.raises(ValueError):
        MlsmConfig(thresholds=())
    with pytest.raises(ValueError):
        MlsmConfig(aggregation="median")


def test_translation_invariance_bit_exact():
    rng = random.Random(5)
    for _ in range(50):
        gt = random_scene(rng)
        pred = perturb(gt, rng)
        dx, dy = rng.randint(-20, 20), rng.randint(-20, 20)
        a = mlsm_scores(pred, gt).to_dict()
        b = mlsm_scores(pred.translated(dx, dy), gt.translated(dx, dy)).to_dict()
        assert a == b
