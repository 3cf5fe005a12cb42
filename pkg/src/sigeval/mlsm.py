"""Multi-level spatial matching: thresholded P/R/F1/AssA over attribute levels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .assignment import CategoryMatch, MatchWeights, match_scene
from .scene import SigScene, align_ego

VEHICLE_LEVELS: tuple[tuple[str, ...], ...] = (("kind",), ("kind", "order"), ("kind", "order", "color"))
ORDER_LEVELS: tuple[tuple[str, ...], ...] = (("order",),)

GT_COUNT = "gt_count"
UNIFORM = "uniform"


@dataclass(frozen=True)
class MlsmConfig:
    thresholds: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0)
    aggregation: str = GT_COUNT

    def __post_init__(self):
        t = self.thresholds
        if not t or any(x <= 0 for x in t) or any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("thresholds must be positive and strictly increasing")
        if self.aggregation not in (GT_COUNT, UNIFORM):
            raise ValueError(f"aggregation must be {GT_COUNT!r} or {UNIFORM!r}")


def level_name(level: Sequence[str]) -> str:
    return "+".join(level)


def _ratio(num: int, den: int, both_empty: bool) -> float:
    if den == 0:
        return 1.0 if both_empty else 0.0
    return num / den


def f1_score(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def classify_pairs(cm: CategoryMatch, level: Sequence[str], alpha: float) -> tuple[int, int, int]:
    """(TP, FP, FN) for one category at one attribute level and threshold."""
    tp = 0
    gt, pred = cm.gt, cm.pred
    for g, p, _ in cm.matching.pairs:
        a, b = gt[g], pred[p]
        if math.hypot(a.x - b.x, a.y - b.y) > alpha:
            continue
        if all(getattr(a, attr) == getattr(b, attr) for attr in level):
            tp += 1
    return tp, len(pred) - tp, len(gt) - tp


@dataclass(frozen=True)
class LevelScores:
    category: str
    level: str
    n_gt: int
    n_pred: int
    tp: tuple[int, ...]
    fp: tuple[int, ...]
    fn: tuple[int, ...]
    p_alpha: tuple[float, ...]
    r_alpha: tuple[float, ...]
    assa_alpha: tuple[float, ...]
    p: float
    r: float
    f1: float
    assa: float

    def to_dict(self) -> dict:
        return {
            "category": self.category, "level": self.level,
            "n_gt": self.n_gt, "n_pred": self.n_pred,
            "TP": list(self.tp), "FP": list(self.fp), "FN": list(self.fn),
            "P_alpha": list(self.p_alpha), "R_alpha": list(self.r_alpha), "AssA_alpha": list(self.assa_alpha),
            "P": self.p, "R": self.r, "F1": self.f1, "AssA": self.assa,
        }


@dataclass(frozen=True)
class MlsmReport:
    thresholds: tuple[float, ...]
    levels: tuple[LevelScores, ...]
    p: float
    r: float
    f1: float
    assa: float
    categories: dict = field(default_factory=dict)

    def summary(self) -> dict[str, float]:
        return {"P": self.p, "R": self.r, "F1": self.f1, "AssA": self.assa}

    def to_dict(self) -> dict:
        return {
            **self.summary(),
            "thresholds": list(self.thresholds),
            "categories": self.categories,
            "levels": [lv.to_dict() for lv in self.levels],
        }


def score_level(cm: CategoryMatch, level: Sequence[str], thresholds: Sequence[float]) -> LevelScores:
    both_empty = not cm.gt and not cm.pred
    tps, fps, fns, ps, rs, aas = [], [], [], [], [], []
    for alpha in thresholds:
        tp, fp, fn = classify_pairs(cm, level, alpha)
        tps.append(tp)
        fps.append(fp)
        fns.append(fn)
        ps.append(_ratio(tp, tp + fp, both_empty))
        rs.append(_ratio(tp, tp + fn, both_empty))
        aas.append(_ratio(tp, tp + fp + fn, both_empty))
    n = len(thresholds)
    p = math.fsum(ps) / n
    r = math.fsum(rs) / n
    return LevelScores(
        cm.category, level_name(level), len(cm.gt), len(cm.pred),
        tuple(tps), tuple(fps), tuple(fns), tuple(ps), tuple(rs), tuple(aas),
        p, r, f1_score(p, r), math.fsum(aas) / n,
    )


def mlsm_from_matches(matches: dict[str, CategoryMatch], cfg: MlsmConfig = MlsmConfig()) -> MlsmReport:
    levels: list[LevelScores] = []
    cat_scores: dict[str, dict] = {}
    for cat, cm in matches.items():
        lvls = VEHICLE_LEVELS if cm.full else ORDER_LEVELS
        block = [score_level(cm, lv, cfg.thresholds) for lv in lvls]
        levels.extend(block)
        k = len(block)
        cat_scores[cat] = {
            "n_gt": len(cm.gt),
            "n_pred": len(cm.pred),
            "P": math.fsum(b.p for b in block) / k,
            "R": math.fsum(b.r for b in block) / k,
            "F1": math.fsum(b.f1 for b in block) / k,
            "AssA": math.fsum(b.assa for b in block) / k,
        }

    weights = _category_weights(cat_scores, cfg.aggregation)
    total = math.fsum(weights.values())
    if total == 0:
        overall = {"P": 1.0, "R": 1.0, "F1": 1.0, "AssA": 1.0}
    else:
        overall = {
            key: math.fsum(weights[c] * cat_scores[c][key] for c in cat_scores) / total
            for key in ("P", "R", "F1", "AssA")
        }
    return MlsmReport(
        tuple(cfg.thresholds), tuple(levels),
        overall["P"], overall["R"], overall["F1"], overall["AssA"], cat_scores,
    )


def _category_weights(cat_scores: dict[str, dict], mode: str) -> dict[str, float]:
    if mode == GT_COUNT:
        w = {c: float(s["n_gt"]) for c, s in cat_scores.items()}
        if any(w.values()):
            return w
        # no ground truth anywhere: fall back to predicted counts (all scores 0)
        return {c: float(s["n_pred"]) for c, s in cat_scores.items()}
    return {c: 1.0 if (s["n_gt"] or s["n_pred"]) else 0.0 for c, s in cat_scores.items()}


def mlsm_scores(pred: SigScene, gt: SigScene, cfg: MlsmConfig = MlsmConfig(),
                w: MatchWeights = MatchWeights()) -> MlsmReport:
    """Align ``pred`` to ``gt``, match per category and score every level."""
    return mlsm_from_matches(match_scene(align_ego(pred, gt), gt, w), cfg)
