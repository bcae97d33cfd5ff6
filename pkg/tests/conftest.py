from __future__ import annotations

import numpy as np
import pytest

from coarsekit import FiniteGroup, QuasiAction, cyclic_group, line_space

FLIP_IMAGES = [0, 1, 2, 3], [3, 2, 1, 0]
FLIPB_IMAGES = [0, 1, 2, 3], [3, 2, 2, 0]


@pytest.fixture
def line4():
    return line_space(4)


@pytest.fixture
def z2():
    return FiniteGroup(["e", "s"], [[0, 1], [1, 0]], "e", name="Z2")


@pytest.fixture
def z4():
    return cyclic_group(4)


@pytest.fixture
def flip(z2, line4):
    return QuasiAction(z2, line4, np.array(FLIP_IMAGES))


@pytest.fixture
def flipb(z2, line4):
    return QuasiAction(z2, line4, np.array(FLIPB_IMAGES))


# -- acceptance summary ------------------------------------------------------

_criteria: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marks = getattr(report, "criterion", None)
    if marks is None:
        return
    _criteria.setdefault(marks, []).append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        ok = all(o == "passed" for _, o in results)
        detail = ", ".join(f"{name}: {o}" for name, o in results)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  ({detail})")
