"""Gaze-to-grid pipeline: attention radius, accumulation, homography, projection.

Image maps are ``(H, W)`` arrays indexed ``[v, u]`` (row, column).  The
10x10 attention grid is indexed ``[y, x]`` so that row 0 is the ego row.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateConfigurationError,
    InvalidSpecError,
    SingularHomographyError,
    SizeMismatchError,
    TooFewPointsError,
    ZeroGtError,
)
from .scene import GRID_SIZE, SceneObject, SigScene

log = logging.getLogger(__name__)

DISK = "disk"
GAUSSIAN = "gaussian"
GAZE_WINDOW = 6
EPS = 1e-7


@dataclass(frozen=True)
class CameraSpec:
    focal_mm: float
    image_w: int
    image_h: int
    sensor_w_mm: float
    sensor_h_mm: float
    fov_w_deg: float
    fov_h_deg: float

    def __post_init__(self):
        for name in ("focal_mm", "image_w", "image_h", "sensor_w_mm", "sensor_h_mm"):
            if not getattr(self, name) > 0:
                raise InvalidSpecError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("fov_w_deg", "fov_h_deg"):
            v = getattr(self, name)
            if not 0 <= v < 180:
                raise InvalidSpecError(f"{name} must lie in [0, 180), got {v}")

    @classmethod
    def from_dict(cls, d) -> "CameraSpec":
        try:
            return cls(
                float(d["focal_mm"]), int(d["image_w"]), int(d["image_h"]),
                float(d["sensor_w_mm"]), float(d["sensor_h_mm"]),
                float(d["fov_w_deg"]), float(d["fov_h_deg"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpecError(f"bad camera spec: {exc}") from None


def attention_radius(cam: CameraSpec) -> float:
    """Pixel radius of the foveal disk: the smaller of the two axis radii."""
    r_w = cam.focal_mm * cam.image_w / cam.sensor_w_mm * math.tan(math.radians(cam.fov_w_deg) / 2)
    r_h = cam.focal_mm * cam.image_h / cam.sensor_h_mm * math.tan(math.radians(cam.fov_h_deg) / 2)
    return min(r_w, r_h)


def minmax(a: np.ndarray) -> np.ndarray:
    lo = a.min()
    hi = a.max()
    if hi == lo:
        return np.zeros_like(a, dtype=float)
    return (a - lo) / (hi - lo)


@dataclass(frozen=True)
class AttentionMap:
    values: np.ndarray

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def accumulate_gaze(points: Iterable[tuple[int, float, float]], radius: float, size: tuple[int, int],
                    frame: int | None = None, kernel: str = DISK) -> AttentionMap:
    """Stamp one kernel per gaze sample, sum and min-max normalise.

    ``size`` is ``(width, height)``.  When ``frame`` is given only samples
    from the six frames ``frame-5 .. frame`` are used.
    """
    w, h = size
    if radius <= 0:
        raise InvalidSpecError(f"radius must be positive, got {radius}")
    acc = np.zeros((h, w), dtype=float)
    vv, uu = np.mgrid[0:h, 0:w]
    used = 0
    for f, x, y in points:
        if frame is not None and not frame - GAZE_WINDOW < f <= frame:
            continue
        if not (0 <= x < w and 0 <= y < h):
            continue
        d2 = (uu - x) ** 2 + (vv - y) ** 2
        if kernel == DISK:
            acc += d2 <= radius * radius
        elif kernel == GAUSSIAN:
            sigma = radius / 2
            acc += np.exp(-d2 / (2 * sigma * sigma))
        else:
            raise ValueError(f"unknown kernel {kernel!r}")
        used += 1
    if used == 0:
        warnings.warn("no valid gaze samples; attention map is all zeros", RuntimeWarning, stacklevel=2)
    return AttentionMap(minmax(acc))


@dataclass(frozen=True)
class Homography:
    """Image -> grid projective map, scaled so the largest-magnitude entry is 1."""

    matrix: np.ndarray

    @classmethod
    def canonical(cls, m: np.ndarray) -> "Homography":
        m = np.asarray(m, dtype=float)
        k = np.unravel_index(np.argmax(np.abs(m)), m.shape)
        if m[k] == 0:
            raise SingularHomographyError("zero matrix")
        return cls(m / m[k])

    def apply(self, pts: np.ndarray) -> np.ndarray:
        return _project(self.matrix, pts)

    def inverse(self) -> np.ndarray:
        det = np.linalg.det(self.matrix)
        if not np.isfinite(det) or abs(det) < 1e-12 * np.abs(self.matrix).max() ** 3:
            raise SingularHomographyError(f"homography is singular (det={det:.3g})")
        return np.linalg.inv(self.matrix)

    def invert(self, pts: np.ndarray) -> np.ndarray:
        return _project(self.inverse(), pts)


def _project(m: np.ndarray, pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    hom = np.column_stack([pts, np.ones(len(pts))]) @ m.T
    return hom[:, :2] / hom[:, 2:3]


def _normalizer(pts: np.ndarray) -> np.ndarray:
    c = pts.mean(axis=0)
    s = np.sqrt(((pts - c) ** 2).sum(axis=1)).mean()
    if s == 0:
        raise DegenerateConfigurationError("all points coincide")
    k = math.sqrt(2) / s
    return np.array([[k, 0, -k * c[0]], [0, k, -k * c[1]], [0, 0, 1.0]])


def estimate_homography(image_pts: Sequence, grid_pts: Sequence) -> Homography:
    """Direct linear transform: the right singular vector of the smallest
    singular value of the stacked 2N x 9 system, with isotropic point
    normalisation for conditioning."""
    src = np.asarray(image_pts, dtype=float).reshape(-1, 2)
    dst = np.asarray(grid_pts, dtype=float).reshape(-1, 2)
    if len(src) != len(dst):
        raise ValueError("image and grid point counts differ")
    if len(src) < 4:
        raise TooFewPointsError(f"need at least 4 correspondences, got {len(src)}")
    ts, td = _normalizer(src), _normalizer(dst)
    s = _project(ts, src)
    d = _project(td, dst)
    rows = []
    for (u, v), (x, y) in zip(s, d):
        rows.append([u, v, 1, 0, 0, 0, -x * u, -x * v, -x])
        rows.append([0, 0, 0, u, v, 1, -y * u, -y * v, -y])
    a = np.array(rows)
    _, sv, vt = np.linalg.svd(a)
    if sv[7] < 1e-10 * sv[0]:
        raise DegenerateConfigurationError("correspondences do not determine a unique homography")
    hn = vt[-1].reshape(3, 3)
    h = np.linalg.inv(td) @ hn @ ts
    if abs(np.linalg.det(h / np.abs(h).max())) < 1e-12:
        raise DegenerateConfigurationError("correspondences yield a singular homography")
    return Homography.canonical(h)


def corner_homography(width: int, height: int) -> Homography:
    """Image corners to grid corners; image top edge maps to the far row.

    A placeholder for tests and demos: it ignores perspective entirely.
    """
    top = GRID_SIZE - 1
    return estimate_homography(
        [(0, 0), (width, 0), (width, height), (0, height)],
        [(0, top), (top, top), (top, 0), (0, 0)],
    )


@dataclass(frozen=True)
class AttentionGrid:
    """10x10 attention weights indexed ``values[y, x]``."""

    values: np.ndarray

    def weight_at(self, x: float, y: float) -> float:
        """Weight of the cell nearest (x, y); off-grid positions clamp for lookup only."""
        n_rows, n_cols = self.values.shape
        cx = min(max(int(math.floor(x + 0.5)), 0), n_cols - 1)
        cy = min(max(int(math.floor(y + 0.5)), 0), n_rows - 1)
        return float(self.values[cy, cx])

    @classmethod
    def uniform(cls, value: float = 1.0) -> "AttentionGrid":
        return cls(np.full((GRID_SIZE, GRID_SIZE), float(value)))


def project_attention(img: AttentionMap, h: Homography, size: int = GRID_SIZE) -> AttentionGrid:
    """Back-project every grid cell through H^-1, floor to a source pixel and
    normalise by the image's min/max.  Cells landing outside the image get 0."""
    hinv = h.inverse()
    ys, xs = np.mgrid[0:size, 0:size]
    cells = np.column_stack([xs.ravel(), ys.ravel()]).astype(float)
    src = _project(hinv, cells)
    a = img.values
    lo, hi = a.min(), a.max()
    out = np.zeros(size * size)
    if hi > lo:
        with np.errstate(invalid="ignore"):
            u = np.floor(_snap(src[:, 0]))
            v = np.floor(_snap(src[:, 1]))
        inside = np.isfinite(u) & np.isfinite(v) & (u >= 0) & (u < img.width) & (v >= 0) & (v < img.height)
        ui = u[inside].astype(int)
        vi = v[inside].astype(int)
        out[inside] = (a[vi, ui] - lo) / (hi - lo)
    return AttentionGrid(out.reshape(size, size))


def _snap(c: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    # round-off from H^-1 must not push an exact pixel coordinate across a floor boundary
    r = np.round(c)
    close = np.abs(c - r) <= tol * np.maximum(1.0, np.abs(c))
    return np.where(close, r, c)


def object_attention(grid: AttentionGrid, scene: SigScene) -> dict[str, float]:
    """Attention weight of every metric object (and the ego) keyed by name."""
    objs: tuple[SceneObject, ...] = scene.metric_objects() + (scene.ego_object,)
    return {o.name: grid.weight_at(o.x, o.y) for o in objs}


# --------------------------------------------------------------------------
# Gaze-map metrics
# --------------------------------------------------------------------------

def pcc(pred: np.ndarray, gt: np.ndarray) -> float:
    a = pred.ravel() - pred.mean()
    b = gt.ravel() - gt.mean()
    den = math.sqrt(float(a @ a) * float(b @ b))
    if den == 0:
        return 0.0
    return float(a @ b) / den


def _distribution(m: np.ndarray, eps: float) -> np.ndarray:
    p = m.ravel().astype(float) + eps
    return p / p.sum()


def kl_divergence(pred: np.ndarray, gt: np.ndarray, eps: float = EPS) -> float:
    """KL(gt || pred) in nats after epsilon smoothing and sum-normalisation."""
    p = _distribution(gt, eps)
    q = _distribution(pred, eps)
    return max(0.0, float(np.sum(p * np.log(p / q))))


def information_gain(pred: np.ndarray, gt: np.ndarray, baseline: np.ndarray, eps: float = EPS) -> float:
    """Bits gained over ``baseline``, averaged with ground-truth mass as weights."""
    g = gt.ravel().astype(float)
    q = _distribution(pred, eps)
    b = _distribution(baseline, eps)
    return float(np.sum(g * (np.log2(q + eps) - np.log2(b + eps))) / g.sum())


@dataclass(frozen=True)
class GazeMetrics:
    pcc: float
    kld: float
    ig: float

    def to_dict(self) -> dict[str, float]:
        return {"PCC": self.pcc, "KL-D": self.kld, "IG": self.ig}


def gaze_metrics(pred: AttentionMap | np.ndarray, gt: AttentionMap | np.ndarray,
                 baseline: AttentionMap | np.ndarray | None = None, eps: float = EPS) -> GazeMetrics:
    p = np.asarray(getattr(pred, "values", pred), dtype=float)
    g = np.asarray(getattr(gt, "values", gt), dtype=float)
    if p.shape != g.shape:
        raise SizeMismatchError(f"prediction {p.shape} vs ground truth {g.shape}")
    if baseline is None:
        b = np.ones_like(g)
    else:
        b = np.asarray(getattr(baseline, "values", baseline), dtype=float)
        if b.shape != g.shape:
            raise SizeMismatchError(f"baseline {b.shape} vs ground truth {g.shape}")
    if not (g > 0).any():
        raise ZeroGtError("ground-truth map has no mass")
    return GazeMetrics(pcc(p, g), kl_divergence(p, g, eps), information_gain(p, g, b, eps))
