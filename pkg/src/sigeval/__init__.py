"""Scoring of spatial intelligence grids: matching, graph and relation metrics."""

from .assignment import MatchWeights, Matching, match_scene, oracle_assignment, solve_assignment
from .attention import (AttentionGrid, AttentionMap, CameraSpec, Homography, accumulate_gaze,
                        attention_radius, corner_homography, estimate_homography, gaze_metrics,
                        project_attention)
from .config import EvalConfig, load_config
from .evaluate import evaluate_frame
from .mlsm import MlsmConfig, mlsm_scores
from .scene import SceneObject, SigScene, align_ego, make_scene, parse_sig, serialize_sig
from .srd import derive_srp, directional_distance, proximal_distance, score_srpf, srd_scores
from .srg import GedCosts, build_srg, srgs

__version__ = "0.1.0"

__all__ = [
    "AttentionGrid", "AttentionMap", "CameraSpec", "EvalConfig", "GedCosts", "Homography",
    "MatchWeights", "Matching", "MlsmConfig", "SceneObject", "SigScene",
    "accumulate_gaze", "align_ego", "attention_radius", "build_srg", "corner_homography",
    "derive_srp", "directional_distance", "estimate_homography", "evaluate_frame", "gaze_metrics",
    "load_config", "make_scene", "match_scene", "mlsm_scores", "oracle_assignment", "parse_sig",
    "project_attention", "proximal_distance", "score_srpf", "serialize_sig", "solve_assignment",
    "srd_scores", "srgs",
]
