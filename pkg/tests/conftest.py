import random

import pytest
from hypothesis import strategies as st

from knapsack_hierarchy import PipInstance, generate_fg, generate_staircase, to_pip


def random_pip(rng: random.Random, n: int, m: int, density: float = 0.7, cap: int = 12) -> PipInstance:
    A, b = [], []
    for _ in range(m):
        bi = rng.randint(1, cap)
        A.append([rng.randint(1, bi) if rng.random() < density else 0 for _ in range(n)])
        b.append(bi)
    w = [rng.randint(0, 9) for _ in range(n)]
    return PipInstance(A, b, w)


@st.composite
def pips(draw, max_n=6, max_m=3):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_pip(random.Random(seed), n, m)


@pytest.fixture(scope="session")
def fg2():
    return generate_fg(2)


@pytest.fixture(scope="session")
def fg3():
    return generate_fg(3)


@pytest.fixture(scope="session")
def s7():
    return generate_staircase(7)


@pytest.fixture(scope="session")
def fg2_pip(fg2):
    return to_pip(fg2)


# -- acceptance summary ---------------------------------------------------------

_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        marker = report.user_properties and dict(report.user_properties).get("criterion")
        if marker:
            _ACCEPTANCE[marker] = report.outcome


@pytest.fixture(autouse=True)
def _tag_criterion(request):
    mark = request.node.get_closest_marker("criterion")
    if mark is not None:
        request.node.user_properties.append(("criterion", mark.args))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), outcome in sorted(_ACCEPTANCE.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
