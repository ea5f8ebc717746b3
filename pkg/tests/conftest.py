import math
import random

import pytest

from asymform.geom import Point, Similarity
from asymform.scenario import random_points


def random_similarity(rng: random.Random) -> Similarity:
    return Similarity(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 2 * math.pi),
                      rng.random() < 0.5, math.exp(rng.uniform(math.log(0.1), math.log(10.0))))


def asymmetric(n: int, seed: int) -> list[Point]:
    return random_points(n, random.Random(f"test:{n}:{seed}"))


def close(p, q, tol=1e-9) -> bool:
    return math.dist(p, q) <= tol


@pytest.fixture
def rng():
    return random.Random(12345)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, 11):
        ok, detail = ACCEPTANCE.get(k, (False, "not run"))
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
