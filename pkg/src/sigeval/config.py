"""Evaluation configuration: one JSON file holding every tunable."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .assignment import MatchWeights
from .attention import EPS
from .errors import ConfigError
from .mlsm import MlsmConfig
from .scene import DEFAULT_ONTOLOGY, Ontology
from .srd import DEFAULT_PROXIMAL_EDGES
from .srg import GedCosts

CONFIG_ENV = "SIG_EVAL_CONFIG"

FRAME_MEAN = "frame_mean"
OBJECT_WEIGHTED = "object_weighted"


@dataclass(frozen=True)
class EvalConfig:
    match_weights: MatchWeights = field(default_factory=MatchWeights)
    mlsm: MlsmConfig = field(default_factory=MlsmConfig)
    ged: GedCosts = field(default_factory=GedCosts)
    proximal_edges: tuple[float, ...] = DEFAULT_PROXIMAL_EDGES
    epsilon: float = EPS
    baseline: str | None = None
    jobs: int = 1
    include_lanes: bool = False
    skip_degenerate: bool = True
    frame_aggregation: str = FRAME_MEAN
    ontology: Ontology = DEFAULT_ONTOLOGY

    def to_dict(self) -> dict[str, Any]:
        return {
            "match_weights": asdict(self.match_weights),
            "mlsm": {"thresholds": list(self.mlsm.thresholds), "aggregation": self.mlsm.aggregation},
            "ged": asdict(self.ged),
            "proximal_edges": list(self.proximal_edges),
            "epsilon": self.epsilon,
            "baseline": self.baseline,
            "jobs": self.jobs,
            "include_lanes": self.include_lanes,
            "skip_degenerate": self.skip_degenerate,
            "frame_aggregation": self.frame_aggregation,
            "ontology": self.ontology.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EvalConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            kw: dict[str, Any] = {}
            if "match_weights" in d:
                kw["match_weights"] = MatchWeights(**d["match_weights"])
            if "mlsm" in d:
                m = dict(d["mlsm"])
                if "thresholds" in m:
                    m["thresholds"] = tuple(float(t) for t in m["thresholds"])
                kw["mlsm"] = MlsmConfig(**m)
            if "ged" in d:
                kw["ged"] = GedCosts(**d["ged"])
            if "proximal_edges" in d:
                edges = tuple(float(e) for e in d["proximal_edges"])
                if len(edges) != 4 or any(b <= a for a, b in zip(edges, edges[1:])) or edges[0] <= 0:
                    raise ValueError("proximal_edges must be 4 strictly increasing positive distances")
                kw["proximal_edges"] = edges
            if "ontology" in d:
                kw["ontology"] = Ontology.from_dict(d["ontology"])
            for k in ("epsilon", "baseline", "jobs", "include_lanes", "skip_degenerate", "frame_aggregation"):
                if k in d:
                    kw[k] = d[k]
            cfg = cls(**kw)
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"invalid config: {exc}") from None
        if cfg.frame_aggregation not in (FRAME_MEAN, OBJECT_WEIGHTED):
            raise ConfigError(f"frame_aggregation must be {FRAME_MEAN!r} or {OBJECT_WEIGHTED!r}")
        if not isinstance(cfg.jobs, int) or cfg.jobs < 1:
            raise ConfigError("jobs must be a positive integer")
        if not cfg.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        return cfg


def load_config(path: str | os.PathLike | None = None) -> EvalConfig:
    """Load from ``path``, else from ``$SIG_EVAL_CONFIG``, else defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return EvalConfig()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return EvalConfig.from_dict(doc)
