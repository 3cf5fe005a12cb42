"""Acceptance gate: one test per criterion, each reported as a PASS/FAIL line
in the terminal summary (see conftest.py).

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import random
import time

import numpy as np
import pytest

from sigeval.assignment import match_scene, oracle_assignment, solve_assignment
from sigeval.attention import (AttentionGrid, AttentionMap, Homography, corner_homography, estimate_homography,
                               gaze_metrics, project_attention)
from sigeval.bench import run_bench, slopes
from sigeval.evaluate import evaluate_frame
from sigeval.mlsm import mlsm_from_matches, mlsm_scores
from sigeval.scene import align_ego
from sigeval.srd import directional_distance, pair_weight, proximal_distance, srd_scores
from sigeval.srg import srgs
from sigeval.synth import delete_object, flip_attribute, move_object, perturb, random_scene

from conftest import ACCEPTANCE
from test_srg import _naive_ged

pytestmark = pytest.mark.acceptance


def record(name, ok, detail):
    ACCEPTANCE[name] = (bool(ok), detail)
    assert ok, detail


def test_worked_examples():
    d = directional_distance("at the back left of", "at the front of")
    p = proximal_distance("adjacent to", "far from")
    # weighted distance for one slot: |back-left - front| = 3, object weights 3 and 4
    w = srd_scores([4], [1], [pair_weight(3, 4)]).mae
    record("worked examples", (d, p, w) == (3, 3, 10.5), f"directional {d}, proximal {p}, weighted {w}")


def test_identity_suite():
    rng = random.Random(2024)
    scenes = [random_scene(rng) for _ in range(500)]
    bad = 0
    t0 = time.perf_counter()
    for s in scenes:
        r = evaluate_frame(s, s)
        ok = (r["MLSM"] == {"P": 1, "R": 1, "F1": 1, "AssA": 1} and r["SRGS"] == {"S": 1, "WS": 1}
              and r["SRD_dir"] == r["SRD_prox"] == {"MAE": 0, "MSE": 0, "Acc": 1})
        bad += not ok
    dt = time.perf_counter() - t0
    record("identity suite", bad == 0 and dt < 10, f"{500 - bad}/500 perfect in {dt:.2f} s (limit 10 s)")


def test_assignment_oracle():
    g = np.random.default_rng(11)
    bad = 0
    for i in range(1000):
        r, c = g.integers(1, 9, 2)
        if i % 2:
            a = g.integers(0, 5, (r, c)).astype(float)  # heavy ties
        else:
            a = g.random((r, c)) * 10
        bad += solve_assignment(a).total != oracle_assignment(a).total
    record("assignment oracle", bad == 0, f"{1000 - bad}/1000 totals equal to exhaustive enumeration")


def test_ged_oracle():
    rng = random.Random(77)
    bad = 0
    for _ in range(200):
        gt = random_scene(rng, max_objects=5)
        pred = perturb(gt, rng, n_ops=rng.randint(1, 4))
        if len(pred.metric_objects()) > 5:
            pred = delete_object(pred, 0)
        bad += srgs(pred, gt).d_total != _naive_ged(gt, pred)
    record("GED oracle", bad == 0, f"{200 - bad}/200 D_total exactly equal to direct summation")


def test_mlsm_properties():
    rng = random.Random(31)
    mono = hier = trans = 0
    for _ in range(500):
        gt = random_scene(rng)
        pred = perturb(gt, rng, n_ops=rng.randint(1, 5))
        rep = mlsm_scores(pred, gt)
        for lv in rep.levels:
            if any(b < a for a, b in zip(lv.p_alpha, lv.p_alpha[1:])) or \
               any(b < a for a, b in zip(lv.r_alpha, lv.r_alpha[1:])):
                mono += 1
        veh = [lv for lv in rep.levels if lv.category == "vehicles"]
        for k in range(len(rep.thresholds)):
            if not veh[2].tp[k] <= veh[1].tp[k] <= veh[0].tp[k]:
                hier += 1
        dx, dy = rng.randint(-30, 30), rng.randint(-30, 30)
        if mlsm_scores(pred.translated(dx, dy), gt.translated(dx, dy)).to_dict() != rep.to_dict():
            trans += 1
    ok = mono == hier == trans == 0
    record("MLSM properties", ok,
           f"500 pairs: {mono} monotonicity, {hier} hierarchy, {trans} translation violations")


def test_degradation_monotonicity():
    rng = random.Random(8)
    weak = strict = 0
    n = 0
    while n < 200:
        gt = random_scene(rng, rng.randint(1, 8))
        n += 1
        base = evaluate_frame(gt, gt)
        i = rng.randrange(len(gt.objects))
        dx, dy = 0, 0
        while max(abs(dx), abs(dy)) < 1:
            dx, dy = rng.randint(-3, 3), rng.randint(-3, 3)
        cases = {
            "delete": delete_object(gt, i),
            "move": move_object(gt, i, dx, dy),
            "flip": flip_attribute(gt, i, rng),
        }
        for name, pred in cases.items():
            r = evaluate_frame(pred, gt)
            f1, s = r["MLSM"]["F1"], r["SRGS"]["S"]
            if f1 > base["MLSM"]["F1"] or s > base["SRGS"]["S"]:
                weak += 1
            if name == "delete" and not (f1 < base["MLSM"]["F1"] and s < base["SRGS"]["S"]):
                strict += 1
    record("degradation monotonicity", weak == strict == 0,
           f"200 scenes x 3 mutations: {weak} increases, {strict} non-strict deletions")


def test_homography_suite():
    g = np.random.default_rng(5)
    worst_ratio = worst_trip = 0.0
    exact = 0
    for _ in range(100):
        w, h = int(g.integers(40, 400)), int(g.integers(30, 300))
        base = corner_homography(w, h).matrix
        m = base @ (np.eye(3) + np.diag([1, 1, 0]) @ g.normal(0, 0.05, (3, 3)))
        m[2] = [g.normal(0, 1e-4), g.normal(0, 1e-4), 1.0]
        if abs(np.linalg.det(m)) < 1e-9:
            continue
        src = np.column_stack([g.uniform(0, w, 8), g.uniform(0, h, 8)])
        dst = Homography(m).apply(src)
        est = estimate_homography(src, dst)
        k = np.unravel_index(np.argmax(np.abs(m)), m.shape)
        worst_ratio = max(worst_ratio, float(np.abs(est.matrix / est.matrix[k] - m / m[k]).max()))
        trip = est.invert(est.apply(src))
        worst_trip = max(worst_trip, float(np.abs(trip - src).max()))
        img = AttentionMap(g.random((h, w)))
        grid = project_attention(img, est).values
        c = float(g.uniform(-50, 50)) or 1.0
        exact += np.array_equal(project_attention(img, Homography(est.matrix * c)).values, grid)
    ok = worst_ratio < 1e-6 and worst_trip < 1e-6 and exact == 100
    record("homography suite", ok,
           f"max ratio dev {worst_ratio:.2e}, max round trip {worst_trip:.2e} px, cH bit-exact {exact}/100")


def test_gaze_metrics():
    g = np.random.default_rng(13)
    m = g.random((60, 80))
    same = gaze_metrics(m, m)
    ig0 = gaze_metrics(m, g.random((60, 80)), baseline=m).ig
    neg = sum(gaze_metrics(g.random((30, 40)) ** 3, g.random((30, 40))).kld < 0 for _ in range(500))
    ok = abs(same.pcc - 1) <= 1e-12 and same.kld < 1e-9 and abs(ig0) < 1e-9 and neg == 0
    record("gaze metrics", ok,
           f"PCC-1 {same.pcc - 1:.1e}, KL {same.kld:.1e}, IG vs baseline {ig0:.1e}, negative KL {neg}/500")


@pytest.mark.slow
def test_runtime_envelope():
    counts = [3, 5, 7, 9, 11, 13, 15, 17, 19, 22]
    rows = run_bench(counts, reps=1000)
    fit = slopes(rows)
    worst_mlsm = max(r.mlsm_s for r in rows)
    worst_srgs = max(r.srgs_s for r in rows)
    worst_srd = max(r.srd_s for r in rows)
    ok = (worst_mlsm < 5e-3 and worst_srgs < 5e-3 and worst_srd < 1e-4
          and 2.0 <= fit["SRGS"] <= 3.6 and 0.5 <= fit["SRD"] <= 1.5)
    record("runtime envelope", ok,
           f"max MLSM {worst_mlsm * 1e3:.3f} ms, SRGS {worst_srgs * 1e3:.3f} ms, SRD {worst_srd * 1e3:.4f} ms; "
           f"slopes SRGS {fit['SRGS']:.2f} (need 2.0-3.6), SRD {fit['SRD']:.2f} (need 0.5-1.5)")


def test_attention_neutrality():
    rng = random.Random(99)
    worst = 0.0
    unequal = 0
    for _ in range(200):
        gt = random_scene(rng)
        pred = perturb(gt, rng, n_ops=rng.randint(1, 4))
        c = rng.uniform(0.01, 1.0)
        r = evaluate_frame(pred, gt, grid=AttentionGrid.uniform(c))
        worst = max(worst, abs(r["HL_SRGS"]["S"] - r["SRGS"]["S"]))
        u = evaluate_frame(pred, gt, grid=AttentionGrid.uniform(1.0))
        unequal += (u["HL_SRD_dir"] != u["SRD_dir"]) or (u["HL_SRD_prox"] != u["SRD_prox"])
    record("attention neutrality", worst < 1e-12 and unequal == 0,
           f"max |dS| {worst:.1e} over 200 pairs; unit-weight SRD differs in {unequal}/200")
