"""Attribute-weighted costs and minimum-cost bipartite assignment.

Rows of every cost matrix are ground-truth objects, columns are predicted
objects.  The solver is a potentials-based Hungarian method followed by a
pass that picks, among all optimal matchings, the lexicographically
smallest one by (gt index, pred index), so reports are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonFiniteCostError, TooLargeError
from .scene import SceneObject, SigScene

ORACLE_MAX_SIDE = 8
ORACLE_MAX_INJECTIONS = 5_000_000


@dataclass(frozen=True)
class MatchWeights:
    """Multiplicative cost factors applied when an attribute matches."""

    omega_color: float = 0.5
    omega_order: float = 0.5
    omega_kind: float = 0.5

    def __post_init__(self):
        for name in ("omega_color", "omega_order", "omega_kind"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int, float], ...]
    unmatched_gt: tuple[int, ...]
    unmatched_pred: tuple[int, ...]

    @property
    def total(self) -> float:
        return math.fsum(c for _, _, c in self.pairs)

    def pred_of(self) -> dict[int, int]:
        return {g: p for g, p, _ in self.pairs}


EMPTY_MATCHING = Matching((), (), ())


def distance(a: SceneObject, b: SceneObject) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def vehicle_cost(gt: SceneObject, pred: SceneObject, w: MatchWeights = MatchWeights()) -> float:
    c = math.hypot(gt.x - pred.x, gt.y - pred.y)
    if gt.color == pred.color:
        c *= w.omega_color
    if gt.order == pred.order:
        c *= w.omega_order
    if gt.kind == pred.kind:
        c *= w.omega_kind
    return c


def sign_light_cost(gt: SceneObject, pred: SceneObject, w: MatchWeights = MatchWeights()) -> float:
    c = math.hypot(gt.x - pred.x, gt.y - pred.y)
    if gt.order == pred.order:
        c *= w.omega_order
    return c


# --------------------------------------------------------------------------
# Solver
# --------------------------------------------------------------------------

def _as_rows(cost) -> tuple[list[list[float]], int, int]:
    if isinstance(cost, np.ndarray):
        arr = cost
    else:
        arr = np.asarray(cost, dtype=float)
    if arr.size == 0:
        if arr.ndim == 2:
            return [], arr.shape[0], arr.shape[1]
        return [], 0, 0
    if arr.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFiniteCostError("cost matrix contains NaN or infinite entries")
    return arr.tolist(), arr.shape[0], arr.shape[1]


def _hungarian(a: list[list[float]], n: int):
    """Square min-cost assignment. Returns (row->col, u, v) with 0-based duals."""
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    cols = range(1, n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = a[i0 - 1]
            ui = u[i0]
            delta = inf
            j1 = 0
            for j in cols:
                if not used[j]:
                    cur = row[j - 1] - ui - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    match = [0] * n
    for j in cols:
        match[p[j] - 1] = j - 1
    return match, u[1:], v[1:]


def _lex_smallest(a, n, match, u, v):
    """Rewrite an optimal matching into the lexicographically smallest optimal one.

    Every optimal matching uses only edges with zero reduced cost under the
    optimal duals, so we greedily improve row by row along alternating
    paths of tight edges.
    """
    scale = max(1.0, max(abs(x) for row in a for x in row))
    tol = 1e-9 * scale
    tight = [[j for j in range(n) if a[i][j] - u[i] - v[j] <= tol] for i in range(n)]
    owner = [0] * n
    for i, j in enumerate(match):
        owner[j] = i

    for i in range(n):
        cur = match[i]
        for j in tight[i]:
            if j >= cur:
                break
            k = owner[j]
            seen = {j}

            def reroute(r: int) -> bool:
                for j2 in tight[r]:
                    if j2 in seen:
                        continue
                    seen.add(j2)
                    if j2 == cur or (owner[j2] > i and reroute(owner[j2])):
                        match[r] = j2
                        owner[j2] = r
                        return True
                return False

            if k > i and reroute(k):
                match[i] = j
                owner[j] = i
                break
    return match


def solve_assignment(cost) -> Matching:
    """Minimum-total-cost maximal matching of a rectangular cost matrix.

    Surplus rows or columns are reported unmatched.  Ties resolve to the
    lexicographically smallest pairing by (gt index, pred index).
    """
    a, rows, cols = _as_rows(cost)
    return _solve_rows(a, rows, cols)


def _solve_rows(a: list[list[float]], rows: int, cols: int) -> Matching:
    if rows == 0 or cols == 0:
        return Matching((), tuple(range(rows)), tuple(range(cols)))
    n = max(rows, cols)
    if rows != cols:
        sentinel = max(max(r) for r in a) + 1.0
        if rows < cols:
            a = a + [[sentinel] * cols for _ in range(cols - rows)]
        else:
            a = [r + [sentinel] * (rows - cols) for r in a]
    match, u, v = _hungarian(a, n)
    if n > 1:
        match = _lex_smallest(a, n, match, u, v)
    pairs = []
    unmatched_gt = []
    matched_pred = set()
    for i in range(rows):
        j = match[i]
        if j < cols:
            pairs.append((i, j, a[i][j]))
            matched_pred.add(j)
        else:
            unmatched_gt.append(i)
    unmatched_pred = tuple(j for j in range(cols) if j not in matched_pred)
    return Matching(tuple(pairs), tuple(unmatched_gt), unmatched_pred)


def oracle_assignment(cost) -> Matching:
    """Exhaustive enumeration over all maximal injections (test oracle)."""
    a, rows, cols = _as_rows(cost)
    if rows == 0 or cols == 0:
        return Matching((), tuple(range(rows)), tuple(range(cols)))
    k = min(rows, cols)
    if k > ORACLE_MAX_SIDE or math.perm(max(rows, cols), k) > ORACLE_MAX_INJECTIONS:
        raise TooLargeError(f"{rows}x{cols} matrix is too large to enumerate")

    best = None
    best_key = None
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            pairs = tuple((i, perm[i]) for i in range(rows))
            total = math.fsum(a[i][j] for i, j in pairs)
            if best is None or total < best or (total == best and pairs < best_key):
                best, best_key = total, pairs
    else:
        for perm in itertools.permutations(range(rows), cols):
            pairs = tuple(sorted((perm[j], j) for j in range(cols)))
            total = math.fsum(a[i][j] for i, j in pairs)
            if best is None or total < best or (total == best and pairs < best_key):
                best, best_key = total, pairs
    matched_gt = {i for i, _ in best_key}
    matched_pred = {j for _, j in best_key}
    return Matching(
        tuple((i, j, a[i][j]) for i, j in best_key),
        tuple(i for i in range(rows) if i not in matched_gt),
        tuple(j for j in range(cols) if j not in matched_pred),
    )


# --------------------------------------------------------------------------
# Scene matching
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CategoryMatch:
    category: str
    full: bool
    gt: tuple[SceneObject, ...]
    pred: tuple[SceneObject, ...]
    matching: Matching


def cost_matrix(gt: Sequence[SceneObject], pred: Sequence[SceneObject], full: bool,
                w: MatchWeights = MatchWeights()) -> list[list[float]]:
    fn = vehicle_cost if full else sign_light_cost
    return [[fn(g, p, w) for p in pred] for g in gt]


def match_scene(pred: SigScene, gt: SigScene, w: MatchWeights = MatchWeights()) -> dict[str, CategoryMatch]:
    """Per-category assignment between aligned scenes.

    The ego is implicitly matched to the ego and never enters a matrix.
    """
    out = {}
    for cat in gt.categories:
        g = gt.by_category(cat)
        p = pred.by_category(cat)
        full = gt.is_full(cat)
        if g and p:
            m = _solve_rows(cost_matrix(g, p, full, w), len(g), len(p))
        else:
            m = Matching((), tuple(range(len(g))), tuple(range(len(p))))
        out[cat] = CategoryMatch(cat, full, g, p, m)
    return out
