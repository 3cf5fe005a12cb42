"""Per-frame and corpus evaluation that ties every metric together."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .assignment import match_scene
from .attention import AttentionGrid
from .config import OBJECT_WEIGHTED, EvalConfig
from .errors import MalformedMapError, SigEvalError
from .io import read_map
from .mlsm import mlsm_from_matches
from .scene import GRID_SIZE, SigScene, SrpAnswers, align_ego, load_sig, parse_srp_answers
from .srd import Srp, SrpTemplate, derive_srp, pair_weight, score_srpf, srd_from_scenes
from .srg import build_srg, graph_matching, srgs_from_graphs

log = logging.getLogger(__name__)

# Fixed block and field order of every report.
BLOCK_FIELDS: dict[str, tuple[str, ...]] = {
    "MLSM": ("P", "R", "F1", "AssA"),
    "SRGS": ("S", "WS"),
    "SRD_dir": ("MAE", "MSE", "Acc"),
    "SRD_prox": ("MAE", "MSE", "Acc"),
    "SRPF_dir": ("MAE", "MSE", "Acc"),
    "SRPF_prox": ("MAE", "MSE", "Acc"),
    "HL_SRGS": ("S", "WS"),
    "HL_SRD_dir": ("MAE", "MSE", "Acc"),
    "HL_SRD_prox": ("MAE", "MSE", "Acc"),
    "HL_SRPF_dir": ("MAE", "MSE", "Acc"),
    "HL_SRPF_prox": ("MAE", "MSE", "Acc"),
}


def _srd_blocks(prefix: str, rep) -> dict[str, dict]:
    d, p = rep.directional, rep.proximal
    return {
        f"{prefix}_dir": {"MAE": d.mae, "MSE": d.mse, "Acc": d.acc},
        f"{prefix}_prox": {"MAE": p.mae, "MSE": p.mse, "Acc": p.acc},
    }


def evaluate_frame(pred: SigScene, gt: SigScene, cfg: EvalConfig = EvalConfig(),
                   grid: AttentionGrid | None = None,
                   answers: SrpAnswers | None = None,
                   template: SrpTemplate | None = None,
                   detail: bool = False) -> dict[str, Any]:
    """Every metric for one frame, as an ordered dict of blocks."""
    if cfg.include_lanes:
        pred, gt = pred.with_lane_objects(), gt.with_lane_objects()
    aligned = align_ego(pred, gt)
    matches = match_scene(aligned, gt, cfg.match_weights)
    mlsm = mlsm_from_matches(matches, cfg.mlsm)
    gt_g, pred_g = build_srg(gt), build_srg(aligned)
    node_match = graph_matching(matches)
    srgs = srgs_from_graphs(gt_g, pred_g, node_match, cfg.ged)
    gt_srp = derive_srp(gt, cfg.proximal_edges, template)
    srd = srd_from_scenes(matches, gt_srp, cfg.proximal_edges, pred_ego=aligned.ego_object,
                          skip_degenerate=cfg.skip_degenerate)

    out: dict[str, Any] = {
        "n_gt": len(gt.metric_objects()),
        "n_pred": len(pred.metric_objects()),
        "MLSM": mlsm.summary(),
        "SRGS": srgs.summary(),
        **_srd_blocks("SRD", srd),
    }
    if answers is not None:
        out.update(_srd_blocks("SRPF", _score_answers(answers, gt_srp, cfg)))

    if grid is not None:
        gw = [grid.weight_at(o.x, o.y) for o in gt_g.nodes]
        pw = [grid.weight_at(o.x, o.y) for o in pred_g.nodes]
        hl = srgs_from_graphs(gt_g, pred_g, node_match, cfg.ged, gw, pw)
        out["HL_SRGS"] = hl.summary()
        slot_w = srp_slot_weights(gt_srp, grid)
        hl_srd = srd_from_scenes(matches, gt_srp, cfg.proximal_edges, slot_w, aligned.ego_object,
                                 cfg.skip_degenerate)
        out.update(_srd_blocks("HL_SRD", hl_srd))
        if answers is not None:
            out.update(_srd_blocks("HL_SRPF", _score_answers(answers, gt_srp, cfg, slot_w)))

    if detail:
        out["detail"] = {"MLSM": mlsm.to_dict(), "SRGS": srgs.to_dict(), "SRP": gt_srp.template.to_dict()}
    return out


def _score_answers(answers: SrpAnswers, gt_srp: Srp, cfg: EvalConfig, weights=None):
    return score_srpf(answers, gt_srp.directional, gt_srp.proximal, weights,
                      gt_srp.template.degenerate, cfg.skip_degenerate)


def srp_slot_weights(srp: Srp, grid: AttentionGrid) -> list[float]:
    return [pair_weight(grid.weight_at(a.x, a.y), grid.weight_at(b.x, b.y)) for a, b in srp.objects]


def aggregate(frames: dict[str, dict], mode: str = "frame_mean") -> dict[str, dict]:
    """Mean of every metric field over the frames that report it."""
    out: dict[str, dict] = {}
    for block, names in BLOCK_FIELDS.items():
        rows = [(f.get("n_gt", 0), f[block]) for f in frames.values() if block in f]
        if not rows:
            continue
        if mode == OBJECT_WEIGHTED:
            weights = [n + 1 for n, _ in rows]  # +1 counts the ego
        else:
            weights = [1] * len(rows)
        total = sum(weights)
        agg = {name: math.fsum(w * r[name] for w, (_, r) in zip(weights, rows)) / total for name in names}
        agg["n_frames"] = len(rows)
        out[block] = agg
    return out


# --------------------------------------------------------------------------
# Corpus evaluation over directories
# --------------------------------------------------------------------------

@dataclass
class CorpusJob:
    pred_dir: Path
    gt_dir: Path
    cfg: EvalConfig
    srp_dir: Path | None = None
    template_dir: Path | None = None
    attention_dir: Path | None = None
    human_like: bool = False
    per_frame: bool = False


@dataclass
class CorpusResult:
    frames: dict[str, dict] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)
    report: dict[str, Any] = field(default_factory=dict)


def load_grid(path) -> AttentionGrid:
    values = read_map(path)
    if values.shape != (GRID_SIZE, GRID_SIZE):
        raise MalformedMapError(f"{path}: attention grid must be {GRID_SIZE}x{GRID_SIZE}, got {values.shape}")
    return AttentionGrid(values)


def _frame_task(args) -> tuple[str, dict | None, str | None]:
    stem, job = args
    try:
        gt = load_sig(job.gt_dir / f"{stem}.json", job.cfg.ontology)
        pred_path = job.pred_dir / f"{stem}.json"
        if not pred_path.exists():
            return stem, None, "missing prediction file"
        pred = load_sig(pred_path, job.cfg.ontology)
        template = None
        if job.template_dir is not None:
            tpath = job.template_dir / f"{stem}.json"
            if tpath.exists():
                template = SrpTemplate.from_dict(json.loads(tpath.read_text(encoding="utf-8")))
        answers = None
        if job.srp_dir is not None:
            apath = job.srp_dir / f"{stem}.json"
            if apath.exists():
                gt_scene = gt.with_lane_objects() if job.cfg.include_lanes else gt
                n = len(derive_srp(gt_scene, job.cfg.proximal_edges, template).template)
                answers = parse_srp_answers(apath.read_bytes(), n)
        grid = None
        if job.human_like:
            gpath = job.attention_dir / f"{stem}.txt"
            if not gpath.exists():
                return stem, None, "missing attention grid"
            grid = load_grid(gpath)
        return stem, evaluate_frame(pred, gt, job.cfg, grid, answers, template, job.per_frame), None
    except (SigEvalError, ValueError, OSError) as exc:
        return stem, None, f"{type(exc).__name__}: {exc}"


def evaluate_corpus(job: CorpusJob) -> CorpusResult:
    stems = sorted(p.stem for p in job.gt_dir.glob("*.json"))
    tasks = [(s, job) for s in stems]
    if job.cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=job.cfg.jobs) as pool:
            results = list(pool.map(_frame_task, tasks, chunksize=max(1, len(tasks) // (4 * job.cfg.jobs))))
    else:
        results = [_frame_task(t) for t in tasks]

    res = CorpusResult()
    for stem, block, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            res.errors[stem] = err
        else:
            res.frames[stem] = block
    report: dict[str, Any] = {
        "n_frames": len(stems),
        "n_evaluated": len(res.frames),
        "aggregate": aggregate(res.frames, job.cfg.frame_aggregation),
        "errors": res.errors,
    }
    if job.per_frame:
        report["frames"] = res.frames
    report["config"] = job.cfg.to_dict()
    res.report = report
    return res


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def summary_rows(frames: dict[str, dict], agg: dict[str, dict]) -> tuple[list[str], list[list]]:
    header = ["frame"]
    for block, names in BLOCK_FIELDS.items():
        if block in agg:
            header.extend(f"{block}.{n}" for n in names)
    rows = []
    for stem, f in frames.items():
        row: list = [stem]
        for col in header[1:]:
            block, name = col.split(".")
            row.append(f[block][name] if block in f else "")
        rows.append(row)
    rows.append(["aggregate"] + [agg[c.split(".")[0]][c.split(".")[1]] for c in header[1:]])
    return header, rows
