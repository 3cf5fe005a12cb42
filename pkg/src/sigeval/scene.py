"""SIG scene model: parsing, serialization and ego alignment.

A scene is one frame of the 10x10 bird's-eye grid.  ``x`` is the column,
``y`` the row, and larger ``y`` means farther ahead of the ego vehicle.
Coordinates are kept as floats so alignment offsets never truncate.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping

from .errors import (
    DuplicateOrderError,
    IndexOutOfRangeError,
    LengthMismatchError,
    MalformedSigError,
    MissingSelfError,
    NonIntegerError,
    OutOfRangeCoordinateError,
    UnknownColorError,
    UnknownKeyError,
    UnknownKindError,
)

GRID_SIZE = 10

COLORS = ("gray", "black", "white", "silver", "blue", "green", "yellow", "red", "purple")
KINDS = ("car", "truck", "van", "bus")

EGO_KEY = "self"
LANES_KEY = "traffic_lanes"

FULL = "full"
ORDER_ONLY = "order"


# --------------------------------------------------------------------------
# Ontology
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Category:
    """One object category of the grid ontology.

    ``schema`` is ``"full"`` (keys like ``"black car 1"``) or ``"order"``
    (keys like ``"sign 1"``, where ``prefix`` is the leading word).
    """

    name: str
    key: str
    schema: str = ORDER_ONLY
    prefix: str = ""
    colors: tuple[str, ...] = ()
    kinds: tuple[str, ...] = ()
    metrics: bool = True

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "key": self.key, "schema": self.schema}
        if self.schema == FULL:
            out["colors"] = list(self.colors)
            out["kinds"] = list(self.kinds)
        else:
            out["prefix"] = self.prefix
        out["metrics"] = self.metrics
        return out

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Category":
        schema = d.get("schema", ORDER_ONLY)
        if schema not in (FULL, ORDER_ONLY):
            raise ValueError(f"unknown category schema {schema!r}")
        return cls(
            name=d["name"],
            key=d.get("key", d["name"]),
            schema=schema,
            prefix=d.get("prefix", ""),
            colors=tuple(d.get("colors", ())),
            kinds=tuple(d.get("kinds", ())),
            metrics=bool(d.get("metrics", True)),
        )


@dataclass(frozen=True)
class Ontology:
    categories: tuple[Category, ...]

    def by_key(self, key: str) -> Category | None:
        for c in self.categories:
            if c.key == key:
                return c
        return None

    def get(self, name: str) -> Category:
        for c in self.categories:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {"categories": [c.to_dict() for c in self.categories]}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Ontology":
        cats = tuple(Category.from_dict(c) for c in d["categories"])
        reserved = {EGO_KEY, LANES_KEY}
        keys = [c.key for c in cats]
        if len(set(keys)) != len(keys) or reserved & set(keys):
            raise ValueError("category keys must be unique and must not shadow 'self'/'traffic_lanes'")
        return cls(cats)


DEFAULT_ONTOLOGY = Ontology((
    Category("vehicles", "vehicles", FULL, colors=COLORS, kinds=KINDS),
    Category("signs", "traffic_signs", ORDER_ONLY, prefix="sign"),
    Category("lights", "traffic_lights", ORDER_ONLY, prefix="light"),
))


# --------------------------------------------------------------------------
# Scene types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SceneObject:
    category: str
    order: int
    x: float
    y: float
    color: str | None = None
    kind: str | None = None
    prefix: str = ""

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def name(self) -> str:
        if self.category == EGO_KEY:
            return EGO_KEY
        if self.kind is not None:
            return f"{self.color} {self.kind} {self.order}"
        return f"{self.prefix} {self.order}"

    @property
    def attrs(self) -> tuple:
        return (self.color, self.kind, self.order)

    def moved(self, dx: float, dy: float) -> "SceneObject":
        return replace(self, x=self.x + dx, y=self.y + dy)


@dataclass(frozen=True)
class Lane:
    order: int
    points: tuple[tuple[float, float], ...]

    @property
    def centroid(self) -> tuple[float, float]:
        n = len(self.points)
        return (math.fsum(p[0] for p in self.points) / n, math.fsum(p[1] for p in self.points) / n)


@dataclass(frozen=True)
class SigScene:
    """One frame's grid world.

    ``objects`` holds every categorised object sorted by (category, order);
    ``categories`` lists the metric-participating category names in
    ontology order, including categories that happen to be empty.
    """

    objects: tuple[SceneObject, ...]
    ego: tuple[float, float]
    lanes: tuple[Lane, ...] = ()
    categories: tuple[str, ...] = ("vehicles", "signs", "lights")
    full_categories: tuple[str, ...] = ("vehicles",)

    def by_category(self, name: str) -> tuple[SceneObject, ...]:
        return tuple(o for o in self.objects if o.category == name)

    @property
    def vehicles(self) -> tuple[SceneObject, ...]:
        return self.by_category("vehicles")

    @property
    def signs(self) -> tuple[SceneObject, ...]:
        return self.by_category("signs")

    @property
    def lights(self) -> tuple[SceneObject, ...]:
        return self.by_category("lights")

    @property
    def ego_object(self) -> SceneObject:
        return SceneObject(EGO_KEY, 0, self.ego[0], self.ego[1])

    def is_full(self, category: str) -> bool:
        return category in self.full_categories

    def metric_objects(self) -> tuple[SceneObject, ...]:
        """Objects of metric-participating categories in canonical order (no ego)."""
        rank = {c: i for i, c in enumerate(self.categories)}
        objs = [o for o in self.objects if o.category in rank]
        objs.sort(key=lambda o: (rank[o.category], o.order))
        return tuple(objs)

    def translated(self, dx: float, dy: float) -> "SigScene":
        return replace(
            self,
            objects=tuple(o.moved(dx, dy) for o in self.objects),
            ego=(self.ego[0] + dx, self.ego[1] + dy),
            lanes=tuple(Lane(l.order, tuple((p[0] + dx, p[1] + dy) for p in l.points)) for l in self.lanes),
        )

    def with_lane_objects(self) -> "SigScene":
        """Expose lanes as order-only objects at their polyline centroid."""
        if "lanes" in self.categories:
            return self
        lane_objs = tuple(SceneObject("lanes", l.order, *l.centroid, prefix="lane") for l in self.lanes)
        return replace(self, objects=self.objects + lane_objs, categories=self.categories + ("lanes",))


def make_scene(
    objects: Iterable[SceneObject],
    ego: tuple[float, float],
    lanes: Iterable[Lane] = (),
    ontology: Ontology = DEFAULT_ONTOLOGY,
) -> SigScene:
    """Build a scene with canonical object ordering."""
    rank = {c.name: i for i, c in enumerate(ontology.categories)}
    objs = sorted(objects, key=lambda o: (rank.get(o.category, len(rank)), o.order))
    return SigScene(
        objects=tuple(objs),
        ego=(float(ego[0]), float(ego[1])),
        lanes=tuple(sorted(lanes, key=lambda l: l.order)),
        categories=tuple(c.name for c in ontology.categories if c.metrics),
        full_categories=tuple(c.name for c in ontology.categories if c.schema == FULL),
    )


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_WS = re.compile(r"\s+")


def _canon_key(key: str) -> str:
    return _WS.sub(" ", key.strip().lower())


def _coord(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedSigError(f"{where}: coordinate {value!r} is not a number")
    if not math.isfinite(value) or value != int(value):
        raise MalformedSigError(f"{where}: coordinate {value!r} is not an integer")
    if not 0 <= value <= GRID_SIZE - 1:
        raise OutOfRangeCoordinateError(f"{where}: coordinate {value!r} outside [0, {GRID_SIZE - 1}]")
    return float(value)


def _position(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise MalformedSigError(f"{where}: position must be a 2-element array, got {value!r}")
    return (_coord(value[0], where), _coord(value[1], where))


def _order(token: str, where: str) -> int:
    if not token.isdigit() or int(token) < 1:
        raise MalformedSigError(f"{where}: order {token!r} is not a positive integer")
    return int(token)


def _parse_full(cat: Category, section: Mapping[str, Any]) -> list[SceneObject]:
    out = []
    seen: set[int] = set()
    for raw_key, pos in section.items():
        key = _canon_key(raw_key)
        parts = key.split(" ")
        if len(parts) != 3:
            raise MalformedSigError(f"{cat.key}: key {raw_key!r} is not 'color kind order'")
        color, kind, order_tok = parts
        if color not in cat.colors:
            raise UnknownColorError(f"{cat.key}: unknown color {color!r} in {raw_key!r}")
        if kind not in cat.kinds:
            raise UnknownKindError(f"{cat.key}: unknown kind {kind!r} in {raw_key!r}")
        order = _order(order_tok, f"{cat.key}.{raw_key}")
        if order in seen:
            raise DuplicateOrderError(f"{cat.key}: order {order} used twice")
        seen.add(order)
        x, y = _position(pos, f"{cat.key}.{raw_key}")
        out.append(SceneObject(cat.name, order, x, y, color=color, kind=kind))
    return out


def _parse_ordered(cat: Category, section: Mapping[str, Any]) -> list[SceneObject]:
    out = []
    seen: set[int] = set()
    for raw_key, pos in section.items():
        key = _canon_key(raw_key)
        parts = key.split(" ")
        if len(parts) != 2 or parts[0] != cat.prefix:
            raise MalformedSigError(f"{cat.key}: key {raw_key!r} is not '{cat.prefix} k'")
        order = _order(parts[1], f"{cat.key}.{raw_key}")
        if order in seen:
            raise DuplicateOrderError(f"{cat.key}: order {order} used twice")
        seen.add(order)
        x, y = _position(pos, f"{cat.key}.{raw_key}")
        out.append(SceneObject(cat.name, order, x, y, prefix=cat.prefix))
    return out


def _parse_lanes(section: Mapping[str, Any]) -> list[Lane]:
    out = []
    seen: set[int] = set()
    for raw_key, pts in section.items():
        parts = _canon_key(raw_key).split(" ")
        if len(parts) != 2 or parts[0] != "lane":
            raise MalformedSigError(f"{LANES_KEY}: key {raw_key!r} is not 'lane k'")
        order = _order(parts[1], f"{LANES_KEY}.{raw_key}")
        if order in seen:
            raise DuplicateOrderError(f"{LANES_KEY}: order {order} used twice")
        seen.add(order)
        if not isinstance(pts, list) or not pts:
            raise MalformedSigError(f"{LANES_KEY}.{raw_key}: expected a non-empty list of points")
        out.append(Lane(order, tuple(_position(p, f"{LANES_KEY}.{raw_key}") for p in pts)))
    return out


def parse_sig(text: str | bytes | Mapping[str, Any], ontology: Ontology = DEFAULT_ONTOLOGY) -> SigScene:
    """Parse and validate a SIG JSON document.

    Accepts raw JSON text or an already-decoded mapping.  Missing category
    sections become empty; a missing ``"self"`` entry is an error.
    """
    if isinstance(text, Mapping):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedSigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedSigError("top-level value must be a JSON object")

    objects: list[SceneObject] = []
    lanes: list[Lane] = []
    ego = None
    for raw_key, section in doc.items():
        key = _canon_key(raw_key)
        if key == EGO_KEY:
            ego = _position(section, EGO_KEY)
            continue
        if key == LANES_KEY:
            if not isinstance(section, dict):
                raise MalformedSigError(f"{LANES_KEY} must be an object")
            lanes = _parse_lanes(section)
            continue
        cat = ontology.by_key(key)
        if cat is None:
            raise UnknownKeyError(f"unknown top-level key {raw_key!r}")
        if not isinstance(section, dict):
            raise MalformedSigError(f"{cat.key} must be an object")
        parse = _parse_full if cat.schema == FULL else _parse_ordered
        objects.extend(parse(cat, section))
    if ego is None:
        raise MissingSelfError("scene has no 'self' entry")
    if ego[1] != 0:
        raise MalformedSigError(f"'self' must sit on row 0, got {ego[1]:g}")
    return make_scene(objects, ego, lanes, ontology)


def load_sig(path, ontology: Ontology = DEFAULT_ONTOLOGY) -> SigScene:
    with open(path, "rb") as fh:
        return parse_sig(fh.read(), ontology)


def _num(v: float) -> int | float:
    return int(v) if float(v).is_integer() else v


def scene_to_dict(scene: SigScene, ontology: Ontology = DEFAULT_ONTOLOGY) -> dict[str, Any]:
    """Canonical JSON-ready dict: lowercase keys, sections in fixed order."""
    out: dict[str, Any] = {}
    cats = list(ontology.categories)
    for c in cats[:1]:
        out[c.key] = {o.name: [_num(o.x), _num(o.y)] for o in scene.by_category(c.name)}
    out[LANES_KEY] = {f"lane {l.order}": [[_num(x), _num(y)] for x, y in l.points] for l in scene.lanes}
    for c in cats[1:]:
        out[c.key] = {o.name: [_num(o.x), _num(o.y)] for o in scene.by_category(c.name)}
    out[EGO_KEY] = [_num(scene.ego[0]), _num(scene.ego[1])]
    return out


def serialize_sig(scene: SigScene, ontology: Ontology = DEFAULT_ONTOLOGY) -> str:
    return json.dumps(scene_to_dict(scene, ontology), separators=(",", ":"))


# --------------------------------------------------------------------------
# Alignment
# --------------------------------------------------------------------------

def align_ego(pred: SigScene, gt: SigScene) -> SigScene:
    """Translate ``pred`` so its ego coincides with ``gt``'s. No clamping."""
    dx = gt.ego[0] - pred.ego[0]
    dy = gt.ego[1] - pred.ego[1]
    if dx == 0 and dy == 0:
        return pred
    return pred.translated(dx, dy)


# --------------------------------------------------------------------------
# SRP answers
# --------------------------------------------------------------------------

N_DIRECTIONAL = 8
N_PROXIMAL = 5


@dataclass(frozen=True)
class SrpAnswers:
    directional: tuple[int, ...]
    proximal: tuple[int, ...]

    def to_dict(self) -> dict[str, list[int]]:
        return {"answers_directional": list(self.directional), "answers_proximal": list(self.proximal)}


def _int_list(value: Any, name: str, upper: int) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise NonIntegerError(f"{name} must be a list of integers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int):
            raise NonIntegerError(f"{name} contains non-integer entry {v!r}")
        if not 0 <= v < upper:
            raise IndexOutOfRangeError(f"{name} entry {v} outside [0, {upper - 1}]")
        out.append(v)
    return tuple(out)


def parse_srp_answers(text: str | bytes | Mapping[str, Any], expected_len: int) -> SrpAnswers:
    if isinstance(text, Mapping):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedSigError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "answers_directional" not in doc or "answers_proximal" not in doc:
        raise MalformedSigError("answers must be an object with answers_directional and answers_proximal")
    extra = set(doc) - {"answers_directional", "answers_proximal"}
    if extra:
        raise UnknownKeyError(f"unexpected keys in answers: {sorted(extra)}")
    d = _int_list(doc["answers_directional"], "answers_directional", N_DIRECTIONAL)
    p = _int_list(doc["answers_proximal"], "answers_proximal", N_PROXIMAL)
    if len(d) != expected_len or len(p) != expected_len:
        raise LengthMismatchError(
            f"expected {expected_len} answers, got {len(d)} directional and {len(p)} proximal"
        )
    return SrpAnswers(d, p)
