"""Random scene generation and perturbation, for property tests and benchmarks."""

from __future__ import annotations

import random
from dataclasses import replace

from .scene import COLORS, GRID_SIZE, KINDS, SceneObject, SigScene, make_scene


def random_scene(rng: random.Random, n_objects: int | None = None, max_objects: int = 8) -> SigScene:
    """Scene with ``n_objects`` non-ego objects split at random across vehicles,
    signs and lights, on integer cells of the grid."""
    if n_objects is None:
        n_objects = rng.randint(0, max_objects)
    counts = [0, 0, 0]
    for _ in range(n_objects):
        counts[rng.choices((0, 1, 2), weights=(3, 1, 1))[0]] += 1
    top = GRID_SIZE - 1
    objs = []
    for k in range(counts[0]):
        objs.append(SceneObject("vehicles", k + 1, rng.randint(0, top), rng.randint(0, top),
                                color=rng.choice(COLORS), kind=rng.choice(KINDS)))
    for k in range(counts[1]):
        objs.append(SceneObject("signs", k + 1, rng.randint(0, top), rng.randint(0, top), prefix="sign"))
    for k in range(counts[2]):
        objs.append(SceneObject("lights", k + 1, rng.randint(0, top), rng.randint(0, top), prefix="light"))
    return make_scene(objs, (rng.randint(0, top), 0))


def delete_object(scene: SigScene, index: int) -> SigScene:
    objs = list(scene.objects)
    del objs[index]
    return replace(scene, objects=tuple(objs))


def move_object(scene: SigScene, index: int, dx: float, dy: float) -> SigScene:
    objs = list(scene.objects)
    objs[index] = objs[index].moved(dx, dy)
    return replace(scene, objects=tuple(objs))


def flip_attribute(scene: SigScene, index: int, rng: random.Random) -> SigScene:
    """Change one attribute of one object to a different valid value.

    Vehicles get a new color or kind; order-only objects swap order with a
    same-category neighbour, or take a fresh order when alone.
    """
    objs = list(scene.objects)
    o = objs[index]
    if o.kind is not None:
        if rng.random() < 0.5:
            objs[index] = replace(o, color=rng.choice([c for c in COLORS if c != o.color]))
        else:
            objs[index] = replace(o, kind=rng.choice([k for k in KINDS if k != o.kind]))
    else:
        same = [i for i, p in enumerate(objs) if p.category == o.category and i != index]
        if same:
            j = rng.choice(same)
            objs[index], objs[j] = replace(o, order=objs[j].order), replace(objs[j], order=o.order)
        else:
            objs[index] = replace(o, order=o.order + 1)
    return make_scene(objs, scene.ego, scene.lanes)


def clamp_to_grid(scene: SigScene) -> SigScene:
    """Pull every position back onto the grid, so the scene can be written as a valid file."""
    top = GRID_SIZE - 1

    def c(v):
        return float(min(max(v, 0), top))

    objs = tuple(replace(o, x=c(o.x), y=c(o.y)) for o in scene.objects)
    return replace(scene, objects=objs, ego=(c(scene.ego[0]), scene.ego[1]))


def perturb(scene: SigScene, rng: random.Random, n_ops: int = 3, keep_on_grid: bool = False) -> SigScene:
    """Apply a few random moves, deletions, insertions, attribute flips and
    ego shifts.  With ``keep_on_grid`` the result is clamped to the grid."""
    if keep_on_grid:
        return clamp_to_grid(perturb(scene, rng, n_ops))
    top = GRID_SIZE - 1
    for _ in range(n_ops):
        op = rng.random()
        if not scene.objects or op < 0.2:
            k = max((v.order for v in scene.vehicles), default=0)
            obj = SceneObject("vehicles", k + 1, rng.randint(0, top), rng.randint(0, top),
                              color=rng.choice(COLORS), kind=rng.choice(KINDS))
            scene = make_scene(scene.objects + (obj,), scene.ego, scene.lanes)
            continue
        if op > 0.95:
            scene = replace(scene, ego=(scene.ego[0] + rng.randint(-2, 2), scene.ego[1]))
            continue
        i = rng.randrange(len(scene.objects))
        if op < 0.4:
            scene = delete_object(scene, i)
        elif op < 0.8:
            scene = move_object(scene, i, rng.randint(-3, 3), rng.randint(-3, 3))
        else:
            scene = flip_attribute(scene, i, rng)
    return scene
