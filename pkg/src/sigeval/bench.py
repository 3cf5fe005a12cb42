"""Per-frame runtime of MLSM, SRGS and SRD over synthetic scenes of growing size."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

import numpy as np

from .assignment import match_scene
from .mlsm import mlsm_from_matches
from .scene import SigScene, align_ego
from .srd import derive_srp, score_srpf
from .srg import GedCosts, build_srg, graph_matching, srgs_from_graphs
from .synth import perturb, random_scene

DEFAULT_COUNTS = (3, 5, 7, 9, 11, 13, 15, 17, 19, 22)
POOL_SIZE = 16


@dataclass(frozen=True)
class BenchRow:
    count: int
    reps: int
    mlsm_s: float
    srgs_s: float
    srd_s: float

    def to_dict(self) -> dict:
        return {"objects": self.count, "reps": self.reps,
                "MLSM_s": self.mlsm_s, "SRGS_s": self.srgs_s, "SRD_s": self.srd_s}


def _mlsm_once(pred: SigScene, gt: SigScene) -> None:
    mlsm_from_matches(match_scene(align_ego(pred, gt), gt))


def _srgs_once(pred: SigScene, gt: SigScene, costs=GedCosts()) -> None:
    aligned = align_ego(pred, gt)
    matches = match_scene(aligned, gt)
    srgs_from_graphs(build_srg(gt), build_srg(aligned), graph_matching(matches), costs)


def scene_pairs(count: int, seed: int, pool: int = POOL_SIZE) -> list[tuple[SigScene, SigScene]]:
    rng = random.Random(seed * 1000 + count)
    pairs = []
    for _ in range(pool):
        gt = random_scene(rng, count)
        pred = perturb(gt, rng, n_ops=max(1, count // 4))
        pairs.append((pred, gt))
    return pairs


def _time_per_call(fn, args_list, reps: int) -> float:
    k = len(args_list)
    clock = time.perf_counter
    t0 = clock()
    for r in range(reps):
        fn(*args_list[r % k])
    return (clock() - t0) / reps


def run_bench(counts=DEFAULT_COUNTS, reps: int = 1000, seed: int = 0) -> list[BenchRow]:
    """Mean wall-clock seconds per frame for each metric at each object count.

    SRD is timed as scoring of the answer lists for every object pair of
    the ground-truth frame, against a perturbed answer set.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    rows = []
    for n in counts:
        if n < 1:
            raise ValueError(f"object counts must be at least 1, got {n}")
        pairs = scene_pairs(n, seed)
        srd_args = []
        for pred, gt in pairs:
            g = derive_srp(gt)
            p = derive_srp(pred)
            ans = p.answers()
            m = min(len(ans.directional), len(g.directional))
            dirs = ans.directional[:m] + g.directional[m:]
            prox = ans.proximal[:m] + g.proximal[m:]
            srd_args.append((type(ans)(dirs, prox), g.directional, g.proximal))
        rows.append(BenchRow(
            n, reps,
            _time_per_call(_mlsm_once, pairs, reps),
            _time_per_call(_srgs_once, pairs, reps),
            _time_per_call(score_srpf, srd_args, reps),
        ))
    return rows


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    if len(lx) < 2 or math.isclose(float(lx.max()), float(lx.min())):
        return float("nan")
    return float(np.polyfit(lx, ly, 1)[0])


def slopes(rows: list[BenchRow]) -> dict[str, float]:
    xs = [r.count for r in rows]
    return {
        "MLSM": loglog_slope(xs, [r.mlsm_s for r in rows]),
        "SRGS": loglog_slope(xs, [r.srgs_s for r in rows]),
        "SRD": loglog_slope(xs, [r.srd_s for r in rows]),
    }


def format_table(rows: list[BenchRow]) -> str:
    lines = [f"{'objects':>8} {'MLSM (ms)':>10} {'SRGS (ms)':>10} {'SRD (ms)':>10}"]
    for r in rows:
        lines.append(f"{r.count:>8d} {r.mlsm_s * 1e3:>10.4f} {r.srgs_s * 1e3:>10.4f} {r.srd_s * 1e3:>10.4f}")
    return "\n".join(lines)
