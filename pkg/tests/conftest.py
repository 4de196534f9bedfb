import pytest

from ecoslice.traffic import default_profile, generate_synthetic


@pytest.fixture(scope="session")
def trace():
    return generate_synthetic(42, default_profile())


@pytest.fixture(scope="session")
def slices(trace):
    return trace.slices


# acceptance criteria report one PASS/FAIL line each, shown at the end of the run
CRITERIA: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
