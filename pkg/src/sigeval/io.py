"""Readers and writers for attention maps, gaze traces and homography configs."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .attention import Homography, estimate_homography
from .errors import MalformedMapError


def read_map(path) -> np.ndarray:
    """Read a map file: a ``H W`` header line then H rows of W reals."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise MalformedMapError(f"{path}: empty map file")
    try:
        h, w = (int(t) for t in lines[0].split())
    except ValueError:
        raise MalformedMapError(f"{path}:1: header must be 'H W'") from None
    if len(lines) - 1 != h:
        raise MalformedMapError(f"{path}: header says {h} rows, found {len(lines) - 1}")
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            row = [float(t) for t in ln.split()]
        except ValueError:
            raise MalformedMapError(f"{path}:{lineno}: non-numeric entry") from None
        if len(row) != w:
            raise MalformedMapError(f"{path}:{lineno}: expected {w} values, found {len(row)}")
        rows.append(row)
    return np.array(rows, dtype=float).reshape(h, w)


def format_map(values: np.ndarray) -> str:
    h, w = values.shape
    out = [f"{h} {w}"]
    out.extend(" ".join(repr(float(x)) for x in row) for row in values)
    return "\n".join(out) + "\n"


def write_map(path, values: np.ndarray) -> None:
    Path(path).write_text(format_map(np.asarray(values, dtype=float)), encoding="utf-8")


def read_gaze_csv(path) -> list[tuple[int, float, float]]:
    """Rows of ``frame,x,y``."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["frame", "x", "y"]:
            raise MalformedMapError(f"{path}:1: header must be 'frame,x,y'")
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append((int(row["frame"]), float(row["x"]), float(row["y"])))
            except (TypeError, ValueError):
                raise MalformedMapError(f"{path}:{lineno}: bad gaze row {row!r}") from None
    return out


def read_homography_config(path) -> Homography:
    """Either ``{"matrix": [[...], [...], [...]]}`` or
    ``{"correspondences": [{"image": [u, v], "grid": [X, Y]}, ...]}``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedMapError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if isinstance(doc, dict) and "matrix" in doc:
        m = np.asarray(doc["matrix"], dtype=float)
        if m.shape != (3, 3) or not np.isfinite(m).all():
            raise MalformedMapError(f"{path}: 'matrix' must be a finite 3x3 array")
        return Homography.canonical(m)
    try:
        corr = doc["correspondences"]
        img = [c["image"] for c in corr]
        grid = [c["grid"] for c in corr]
    except (KeyError, TypeError):
        raise MalformedMapError(f"{path}: expected 'matrix' or a 'correspondences' list of image/grid pairs") from None
    return estimate_homography(img, grid)
