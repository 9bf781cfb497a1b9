import re

import pytest

from thermalcp import Drude, LevelSystem, PlanarGeometry
from thermalcp import constants as const

GOLD = Drude(1.37e16, 4.06e13)
RB_OMEGA = 2.37e15
RB_DIPOLE = 4.46e-29
CAF_ROT_OMEGA = 1.32e11
CAF_ROT_DIPOLE = 3.07 * const.debye


@pytest.fixture
def gold():
    return GOLD


@pytest.fixture
def rb():
    return LevelSystem.two_level(RB_OMEGA, RB_DIPOLE)


@pytest.fixture
def caf_rot():
    return LevelSystem.two_level(CAF_ROT_OMEGA, CAF_ROT_DIPOLE)


@pytest.fixture
def caf_geometry():
    return PlanarGeometry(5e-6, GOLD)


def random_three_level(rng):
    """Three levels with random spacings in the thermal range and random dipoles."""
    w1 = rng.uniform(0.5e13, 5e13)
    w2 = w1 + rng.uniform(0.5e13, 5e13)
    d = rng.uniform(0.5, 3.0, size=3) * const.debye
    return LevelSystem.from_transitions(
        [0.0, const.hbar * w1, const.hbar * w2], {(0, 1): d[0], (1, 2): d[1], (0, 2): d[2]}
    )


# one pass/fail line per acceptance criterion at the end of the run
_acceptance = {}
_details = {}


@pytest.fixture
def measured(request):
    """Record the measured quantities of an acceptance criterion for the summary."""
    def note(text):
        _details[request.node.nodeid] = text
    return note


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, outcome in sorted(_acceptance.items(), key=lambda kv: _criterion_key(kv[0])):
        name = nodeid.split("::")[-1]
        detail = _details.get(nodeid, "")
        line = f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)


def _criterion_key(nodeid):
    m = re.search(r"criterion_(\d+)", nodeid)
    return int(m.group(1)) if m else 0
