import random

import pytest

from sigeval.scene import SceneObject, make_scene

# criterion name -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def veh(order, x, y, color="black", kind="car"):
    return SceneObject("vehicles", order, x, y, color=color, kind=kind)


def sign(order, x, y):
    return SceneObject("signs", order, x, y, prefix="sign")


def light(order, x, y):
    return SceneObject("lights", order, x, y, prefix="light")


def scene(*objs, ego=(4, 0)):
    return make_scene(objs, ego)


@pytest.fixture
def rng():
    return random.Random(1234)
