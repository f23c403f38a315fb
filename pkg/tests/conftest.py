import pytest

from nomaperf.channel import Geometry
from nomaperf.chebyshev import build_model


@pytest.fixture
def geo52():
    return Geometry(radius_rd=5.0, alpha=2.0, num_users=2)


@pytest.fixture
def geo53():
    return Geometry(radius_rd=5.0, alpha=3.0, num_users=2)


@pytest.fixture
def model52(geo52):
    return build_model(geo52, 10)


@pytest.fixture
def model53(geo53):
    return build_model(geo53, 10)


# acceptance criterion number -> list of (passed, detail)
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE.setdefault(number, []).append((bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}")
