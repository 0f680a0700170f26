import os
import random
import sys

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from derandsat.cnf import CnfFormula  # noqa: E402

_CRITERIA = {}

# first calls build lookup tables; wall-clock deadlines would be flaky
settings.register_profile("derandsat", deadline=None)
settings.load_profile("derandsat")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[number] = (title, rep.passed, detail, round(rep.duration, 2))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail, secs = _CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({secs}s) {detail}".rstrip())


def random_cnf(rng: random.Random, n, M, min_w=1, max_w=3):
    clauses = []
    for _ in range(M):
        k = rng.randint(min_w, min(max_w, n))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), k)))
    return CnfFormula(n, tuple(clauses))


@st.composite
def cnfs(draw, max_n=8, max_m=10, max_w=4):
    n = draw(st.integers(1, max_n))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=max_w), max_size=max_m))
    return CnfFormula(n, tuple(tuple(c) for c in clauses))


@st.composite
def restrictions(draw, n):
    return "".join(draw(st.lists(st.sampled_from("01*"), min_size=n, max_size=n)))
