"""Semantic relational distance between prepositions, and SRP derivation."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from .assignment import CategoryMatch
from .errors import LengthMismatchError
from .scene import SceneObject, SigScene, SrpAnswers
from .srg import direction_bin

DIRECTIONAL_LABELS = (
    "at the back of",
    "at the back left of",
    "at the left of",
    "at the front left of",
    "at the front of",
    "at the front right of",
    "at the right of",
    "at the back right of",
)
PROXIMAL_LABELS = ("adjacent to", "close to", "at a distance", "far from", "far away from")

# Upper edges (grid cells) of the first four proximal bins.
DEFAULT_PROXIMAL_EDGES = (1.5, 3.5, 5.5, 8.0)

DIRECTIONAL = "directional"
PROXIMAL = "proximal"


def _index(label, labels: Sequence[str]) -> int:
    if isinstance(label, str):
        try:
            return labels.index(label)
        except ValueError:
            raise ValueError(f"unknown preposition {label!r}") from None
    if not 0 <= label < len(labels):
        raise ValueError(f"label index {label} outside [0, {len(labels) - 1}]")
    return label


# cyclic step distance indexed by the signed label difference (negative indices wrap)
_CYCLIC = (0, 1, 2, 3, 4, 3, 2, 1)


def directional_distance(a, b) -> int:
    """Steps around the eight-label circle; accepts indices or label strings."""
    d = abs(_index(a, DIRECTIONAL_LABELS) - _index(b, DIRECTIONAL_LABELS))
    return min(d, 8 - d)


def proximal_distance(a, b) -> int:
    return abs(_index(a, PROXIMAL_LABELS) - _index(b, PROXIMAL_LABELS))


@dataclass(frozen=True)
class SrdScores:
    mae: float
    mse: float
    acc: float
    n: int

    def to_dict(self) -> dict:
        return {"MAE": self.mae, "MSE": self.mse, "Acc": self.acc, "n": self.n}


def srd_scores(pred: Sequence[int], gt: Sequence[int], weights: Sequence[float] | None = None,
               kind: str = DIRECTIONAL, mask: Sequence[bool] | None = None) -> SrdScores:
    """MAE, MSE and accuracy of per-slot step distances.

    With ``weights`` each slot's distance is multiplied by its weight before
    averaging (accuracy is unaffected).  Slots where ``mask`` is False are
    skipped.  An empty slot list scores MAE = MSE = 0, Acc = 1.
    """
    n = len(gt)
    if len(pred) != n:
        raise LengthMismatchError(f"{len(pred)} predicted labels for {n} ground-truth labels")
    if weights is not None and len(weights) != n:
        raise LengthMismatchError(f"{len(weights)} weights for {n} labels")
    if mask is not None:
        if len(mask) != n:
            raise LengthMismatchError(f"{len(mask)} mask entries for {n} labels")
        keep = [i for i in range(n) if mask[i]]
        pred = [pred[i] for i in keep]
        gt = [gt[i] for i in keep]
        if weights is not None:
            weights = [weights[i] for i in keep]
        n = len(keep)
    if n == 0:
        return SrdScores(0.0, 0.0, 1.0, 0)

    if kind == DIRECTIONAL:
        dist = [_CYCLIC[a - b] for a, b in zip(pred, gt)]
    elif kind == PROXIMAL:
        dist = [abs(a - b) for a, b in zip(pred, gt)]
    else:
        raise ValueError(f"unknown SRD kind {kind!r}")
    hits = dist.count(0)
    if weights is None:
        # integer distances: plain sums are exact
        return SrdScores(sum(dist) / n, sum([d * d for d in dist]) / n, hits / n, n)
    dist = [d * w for d, w in zip(dist, weights)]
    return SrdScores(math.fsum(dist) / n, math.fsum([d * d for d in dist]) / n, hits / n, n)


def pair_weight(w_a: float, w_b: float) -> float:
    """Slot weight of a relation: mean attention of its two objects."""
    return (w_a + w_b) / 2


# --------------------------------------------------------------------------
# SRP derivation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SrpTemplate:
    pairs: tuple[tuple[str, str], ...]
    degenerate: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def directional_text(self) -> str:
        return _paragraph(self.pairs, "[directional preposition]")

    def proximal_text(self) -> str:
        return _paragraph(self.pairs, "[proximal preposition]")

    def to_dict(self) -> dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "degenerate": [i for i, d in enumerate(self.degenerate) if d],
            "num_placeholders": len(self.pairs),
            "template_directional": self.directional_text(),
            "template_proximal": self.proximal_text(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SrpTemplate":
        pairs = tuple((str(a), str(b)) for a, b in d["pairs"])
        deg = set(d.get("degenerate", ()))
        return cls(pairs, tuple(i in deg for i in range(len(pairs))))


def _paragraph(pairs, slot: str) -> str:
    if not pairs:
        return "."
    sentences = []
    for a, b in pairs:
        s = f"{a} is {slot} {b}."
        sentences.append(s[0].upper() + s[1:])
    return " ".join(sentences)


@dataclass(frozen=True)
class Srp:
    template: SrpTemplate
    objects: tuple[tuple[SceneObject, SceneObject], ...]
    directional: tuple[int, ...]
    proximal: tuple[int, ...]

    def answers(self) -> SrpAnswers:
        return SrpAnswers(self.directional, self.proximal)


def proximal_label(d: float, edges: Sequence[float] = DEFAULT_PROXIMAL_EDGES) -> int:
    return bisect.bisect_right(edges, d)


def relation(a: SceneObject, b: SceneObject, edges: Sequence[float] = DEFAULT_PROXIMAL_EDGES):
    """(directional index, proximal index, degenerate) for "a is <prep> b"."""
    dx, dy = a.x - b.x, a.y - b.y
    k = direction_bin(dx, dy)
    return (0 if k is None else k), proximal_label(math.hypot(dx, dy), edges), k is None


def scene_objects_for_srp(scene: SigScene) -> tuple[SceneObject, ...]:
    """Canonical SRP object order: categories in order, each by order, ego last."""
    return scene.metric_objects() + (scene.ego_object,)


def derive_srp(scene: SigScene, edges: Sequence[float] = DEFAULT_PROXIMAL_EDGES,
               template: SrpTemplate | None = None) -> Srp:
    """Ground-truth relation labels for every object pair of ``scene``.

    Without a template, pairs (A, B) enumerate A before B in canonical
    order.  With a template, pairs are looked up by object name.
    """
    objs = scene_objects_for_srp(scene)
    if template is None:
        pairs = [(objs[i], objs[j]) for i in range(len(objs)) for j in range(i + 1, len(objs))]
    else:
        by_name = {o.name: o for o in objs}
        try:
            pairs = [(by_name[a], by_name[b]) for a, b in template.pairs]
        except KeyError as exc:
            raise ValueError(f"template names object {exc.args[0]!r} absent from the scene") from None
    dirs, proxs, degs = [], [], []
    for a, b in pairs:
        d, p, deg = relation(a, b, edges)
        dirs.append(d)
        proxs.append(p)
        degs.append(deg)
    tmpl = SrpTemplate(tuple((a.name, b.name) for a, b in pairs), tuple(degs))
    return Srp(tmpl, tuple(pairs), tuple(dirs), tuple(proxs))


@dataclass(frozen=True)
class SrdReport:
    directional: SrdScores
    proximal: SrdScores

    def to_dict(self) -> dict:
        return {"directional": self.directional.to_dict(), "proximal": self.proximal.to_dict()}


def score_srpf(answers: SrpAnswers, gt_dir: Sequence[int], gt_prox: Sequence[int],
               weights: Sequence[float] | None = None,
               degenerate: Sequence[bool] | None = None,
               skip_degenerate: bool = True) -> SrdReport:
    """Score SRP answers against ground-truth labels.

    Directional slots whose ground-truth objects coincide have no defined
    direction and are skipped unless ``skip_degenerate`` is False.
    """
    if len(answers.directional) != len(gt_dir) or len(answers.proximal) != len(gt_prox):
        raise LengthMismatchError(
            f"answers have {len(answers.directional)}/{len(answers.proximal)} entries, "
            f"expected {len(gt_dir)}/{len(gt_prox)}"
        )
    mask = None
    if degenerate is not None and skip_degenerate and any(degenerate):
        mask = [not d for d in degenerate]
    return SrdReport(
        srd_scores(answers.directional, gt_dir, weights, DIRECTIONAL, mask),
        srd_scores(answers.proximal, gt_prox, weights, PROXIMAL),
    )


def srd_from_scenes(matches: dict[str, CategoryMatch], gt_srp: Srp,
                    edges: Sequence[float] = DEFAULT_PROXIMAL_EDGES,
                    weights: Sequence[float] | None = None,
                    pred_ego: SceneObject | None = None,
                    skip_degenerate: bool = True) -> SrdReport:
    """Score the relations implied by an aligned predicted scene.

    Each ground-truth pair is mapped through the object matching to the
    predicted pair and its labels are recomputed from predicted positions.
    A pair with an unmatched object gets the farthest label on each scale
    (antipodal direction, proximal distance 4).
    """
    corr: dict[tuple[str, int], SceneObject] = {}
    for cm in matches.values():
        for g, p, _ in cm.matching.pairs:
            corr[(cm.category, cm.gt[g].order)] = cm.pred[p]
    dirs, proxs = [], []
    for (a, b), gd, gp in zip(gt_srp.objects, gt_srp.directional, gt_srp.proximal):
        pa = pred_ego if a.category == "self" else corr.get((a.category, a.order))
        pb = pred_ego if b.category == "self" else corr.get((b.category, b.order))
        if pa is None or pb is None:
            dirs.append((gd + 4) % 8)
            proxs.append(4 if gp <= 2 else 0)
            continue
        d, p, _ = relation(pa, pb, edges)
        dirs.append(d)
        proxs.append(p)
    return score_srpf(SrpAnswers(tuple(dirs), tuple(proxs)), gt_srp.directional, gt_srp.proximal,
                      weights, gt_srp.template.degenerate, skip_degenerate)
