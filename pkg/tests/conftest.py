import numpy as np
import pytest

from maxent_orbits.groups import Family, make_group_spec

CASES = [
    ("U", 2), ("U", 3), ("SU", 2), ("SU", 3), ("SOeven", 2), ("SOeven", 3),
    ("SOodd", 1), ("SOodd", 2), ("Oeven", 2), ("USp", 1), ("USp", 2),
]

CONNECTED = [c for c in CASES if c[0] != "Oeven"]

_ACCEPTANCE = []


def random_cartan(spec, rng, low=-2.0, high=2.0):
    v = rng.uniform(low, high, spec.coord_len)
    if spec.family == Family.SU:
        v = v - v.mean()
    return v


def case_id(case):
    return f"{case[0]}{case[1]}"


@pytest.fixture(params=CASES, ids=case_id)
def spec(request):
    return make_group_spec(*request.param)


@pytest.fixture(params=CONNECTED, ids=case_id)
def connected_spec(request):
    return make_group_spec(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, title, passed, detail=""):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
