"""Spatial relation graphs and matching-induced graph edit distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .assignment import CategoryMatch, Matching, MatchWeights, match_scene
from .errors import DegenerateDMaxError
from .scene import SceneObject, SigScene, align_ego

# Sector centres in degrees, index = directional label index.
# back, back-left, left, front-left, front, front-right, right, back-right
_SECTOR_WIDTH = 45.0


def direction_bin(dx: float, dy: float) -> int | None:
    """8-sector bin of a displacement (+y is front, +x is right).

    Returns ``None`` for the zero vector.  A displacement lying exactly on
    a sector boundary goes to the smaller label index.
    """
    if dx == 0 and dy == 0:
        return None
    theta = math.degrees(math.atan2(dy, dx))
    t = ((270.0 - theta) % 360.0) / _SECTOR_WIDTH
    k = math.floor(t)
    frac = t - k
    if frac > 0.5:
        k += 1
    elif frac == 0.5:
        k = min(k % 8, (k + 1) % 8)
    return k % 8


@dataclass(frozen=True)
class SpatialRelationGraph:
    """Complete directed graph; ``length[i][j]``/``bin[i][j]`` describe edge i->j.

    The edge attribute is the displacement ``pos_i - pos_j`` ("i is <dir> of j").
    The ego is always the last node.
    """

    nodes: tuple[SceneObject, ...]
    length: tuple[tuple[float, ...], ...]
    bin: tuple[tuple[int | None, ...], ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        n = len(self.nodes)
        return n * (n - 1)

    def edges(self):
        n = len(self.nodes)
        for i in range(n):
            for j in range(n):
                if i != j:
                    yield i, j, self.length[i][j], self.bin[i][j]


def build_srg(scene: SigScene) -> SpatialRelationGraph:
    nodes = scene.metric_objects() + (scene.ego_object,)
    xs = [o.x for o in nodes]
    ys = [o.y for o in nodes]
    n = len(nodes)
    hypot = math.hypot
    lengths = []
    bins = []
    for i in range(n):
        xi, yi = xs[i], ys[i]
        lrow = []
        brow = []
        for j in range(n):
            dx = xi - xs[j]
            dy = yi - ys[j]
            lrow.append(hypot(dx, dy))
            brow.append(direction_bin(dx, dy) if i != j else None)
        lengths.append(tuple(lrow))
        bins.append(tuple(brow))
    return SpatialRelationGraph(nodes, tuple(lengths), tuple(bins))


@dataclass(frozen=True)
class GedCosts:
    lambda_node: float = 2.0
    eta_node_del: float = 5.0
    eta_node_ins: float = 5.0
    lambda_edge: float = 2.0
    eta_edge_del: float = 2.0
    eta_edge_ins: float = 2.0
    gamma: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        for name, v in vars(self).items():
            if v < 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")
        if self.gamma + self.beta <= 0:
            raise ValueError("gamma + beta must be positive")


def graph_matching(matches: dict[str, CategoryMatch]) -> Matching:
    """Node-index matching over graphs built by :func:`build_srg`.

    Node order in the graph is category order then object order, which is
    exactly the row/column order of each category's cost matrix.
    """
    pairs = []
    un_gt = []
    un_pred = []
    og = op = 0
    for cm in matches.values():
        for g, p, c in cm.matching.pairs:
            pairs.append((og + g, op + p, c))
        un_gt.extend(og + g for g in cm.matching.unmatched_gt)
        un_pred.extend(op + p for p in cm.matching.unmatched_pred)
        og += len(cm.gt)
        op += len(cm.pred)
    pairs.append((og, op, 0.0))  # ego <-> ego
    return Matching(tuple(pairs), tuple(un_gt), tuple(un_pred))


def _node_differs(a: SceneObject, b: SceneObject) -> bool:
    return a.color != b.color or a.kind != b.kind or a.order != b.order


def node_edit_distance(gt: SpatialRelationGraph, pred: SpatialRelationGraph, matching: Matching,
                       costs: GedCosts = GedCosts(),
                       gt_weights: Sequence[float] | None = None,
                       pred_weights: Sequence[float] | None = None) -> float:
    return math.fsum(_node_terms(gt, pred, matching, costs, gt_weights, pred_weights))


def _node_terms(gt, pred, matching, costs, gt_weights, pred_weights) -> list[float]:
    """Substitutions over matched nodes plus insertions (unmatched GT) and
    deletions (unmatched predictions).

    With per-node attention weights, each term is scaled by the weight of
    the node it concerns; substitutions use the ground-truth node's weight.
    """
    terms = []
    gn, pn = gt.nodes, pred.nodes
    for g, p, _ in matching.pairs:
        a, b = gn[g], pn[p]
        c = math.hypot(a.x - b.x, a.y - b.y)
        if _node_differs(a, b):
            c += costs.lambda_node
        terms.append(c if gt_weights is None else c * gt_weights[g])
    for g in matching.unmatched_gt:
        terms.append(costs.eta_node_ins if gt_weights is None else costs.eta_node_ins * gt_weights[g])
    for p in matching.unmatched_pred:
        terms.append(costs.eta_node_del if pred_weights is None else costs.eta_node_del * pred_weights[p])
    return terms


def edge_edit_distance(gt: SpatialRelationGraph, pred: SpatialRelationGraph, matching: Matching,
                       costs: GedCosts = GedCosts(),
                       gt_weights: Sequence[float] | None = None,
                       pred_weights: Sequence[float] | None = None) -> float:
    """Edge costs under the edge correspondence induced by the node matching.

    Edge (i, j) of the ground truth corresponds to (m(i), m(j)) of the
    prediction when both endpoints are matched.  Weighted terms use the
    mean attention of the two endpoints.
    """
    return math.fsum(_edge_terms(gt, pred, matching, costs, gt_weights, pred_weights))


def _edge_terms(gt, pred, matching, costs, gt_weights, pred_weights) -> list[float]:
    lam = costs.lambda_edge
    ins = costs.eta_edge_ins
    dele = costs.eta_edge_del
    m = [-1] * gt.n_nodes
    for g, p, _ in matching.pairs:
        m[g] = p
    matched_pred = [False] * pred.n_nodes
    for g, p, _ in matching.pairs:
        matched_pred[p] = True

    terms = []
    gl, gb = gt.length, gt.bin
    pl, pb = pred.length, pred.bin
    n = gt.n_nodes
    weighted = gt_weights is not None
    n_matched = 0
    for i in range(n):
        mi = m[i]
        for j in range(n):
            if i == j:
                continue
            mj = m[j]
            if mi >= 0 and mj >= 0:
                n_matched += 1
                c = abs(gl[i][j] - pl[mi][mj])
                if gb[i][j] != pb[mi][mj]:
                    c += lam
            else:
                c = ins
            if weighted:
                c *= 0.5 * (gt_weights[i] + gt_weights[j])
            terms.append(c)

    if not weighted:
        n_pred_unmatched = pred.n_edges - n_matched
        terms.append(dele * n_pred_unmatched)
    else:
        k = pred.n_nodes
        for i in range(k):
            for j in range(k):
                if i != j and not (matched_pred[i] and matched_pred[j]):
                    terms.append(dele * 0.5 * (pred_weights[i] + pred_weights[j]))
    return terms


def max_distance(gt: SpatialRelationGraph, pred: SpatialRelationGraph, costs: GedCosts,
                 gamma: float, beta: float,
                 gt_weights: Sequence[float] | None = None,
                 pred_weights: Sequence[float] | None = None) -> float:
    """Worst case: every node and edge on both sides unmatched."""
    if gt_weights is None:
        d_n = costs.eta_node_ins * gt.n_nodes + costs.eta_node_del * pred.n_nodes
        d_e = costs.eta_edge_ins * gt.n_edges + costs.eta_edge_del * pred.n_edges
        return gamma * d_n + beta * d_e
    d_n = math.fsum([costs.eta_node_ins * math.fsum(gt_weights),
                     costs.eta_node_del * math.fsum(pred_weights)])
    d_e = math.fsum([costs.eta_edge_ins * _edge_weight_mass(gt_weights),
                     costs.eta_edge_del * _edge_weight_mass(pred_weights)])
    return gamma * d_n + beta * d_e


def _edge_weight_mass(w: Sequence[float]) -> float:
    # sum over ordered pairs i != j of (w_i + w_j) / 2  ==  (n - 1) * sum(w)
    return (len(w) - 1) * math.fsum(w)


def similarity(d_total: float, d_max: float) -> float:
    if d_max == 0:
        if d_total > 0:
            raise DegenerateDMaxError("worst-case distance is zero but edit distance is positive")
        return 1.0
    return max(0.0, 1.0 - d_total / d_max)


@dataclass(frozen=True)
class SrgsResult:
    d_node: float
    d_edge: float
    d_total: float
    d_max: float
    s: float
    ws: float
    ws_total: float
    ws_max: float

    def summary(self) -> dict[str, float]:
        return {"S": self.s, "WS": self.ws}

    def to_dict(self) -> dict[str, float]:
        return {
            "S": self.s, "WS": self.ws,
            "D_node": self.d_node, "D_edge": self.d_edge,
            "D_total": self.d_total, "D_max": self.d_max,
            "WS_total": self.ws_total, "WS_max": self.ws_max,
        }


def srgs_from_graphs(gt_g: SpatialRelationGraph, pred_g: SpatialRelationGraph, node_match: Matching,
                     costs: GedCosts = GedCosts(),
                     gt_weights: Sequence[float] | None = None,
                     pred_weights: Sequence[float] | None = None) -> SrgsResult:
    if (gt_weights is None) != (pred_weights is None):
        raise ValueError("attention weights must be given for both graphs or neither")
    node_terms = _node_terms(gt_g, pred_g, node_match, costs, gt_weights, pred_weights)
    edge_terms = _edge_terms(gt_g, pred_g, node_match, costs, gt_weights, pred_weights)
    d_n = math.fsum(node_terms)
    d_e = math.fsum(edge_terms)
    d_total = math.fsum(node_terms + edge_terms)
    d_max = max_distance(gt_g, pred_g, costs, 1.0, 1.0, gt_weights, pred_weights)
    ws_total = costs.gamma * d_n + costs.beta * d_e
    ws_max = max_distance(gt_g, pred_g, costs, costs.gamma, costs.beta, gt_weights, pred_weights)
    return SrgsResult(d_n, d_e, d_total, d_max, similarity(d_total, d_max),
                      similarity(ws_total, ws_max), ws_total, ws_max)


def srgs(pred: SigScene, gt: SigScene, costs: GedCosts = GedCosts(), w: MatchWeights = MatchWeights(),
         weights=None) -> SrgsResult:
    """Graph similarity S (gamma = beta = 1) and weighted similarity WS.

    ``weights`` is an optional :class:`~sigeval.attention.AttentionGrid`;
    when given, every edit term is scaled by attention (human-like SRGS).
    """
    aligned = align_ego(pred, gt)
    matches = match_scene(aligned, gt, w)
    gt_g = build_srg(gt)
    pred_g = build_srg(aligned)
    gw = pw = None
    if weights is not None:
        gw = [weights.weight_at(o.x, o.y) for o in gt_g.nodes]
        pw = [weights.weight_at(o.x, o.y) for o in pred_g.nodes]
    return srgs_from_graphs(gt_g, pred_g, graph_matching(matches), costs, gw, pw)
