import pytest

from harmshear.report import Grid

# criterion number -> (description, passed); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, list] = {}


@pytest.fixture(scope="session")
def small_grid():
    return Grid.standard(n_radii=12, r_max=0.9, angles=96)


@pytest.fixture(scope="session")
def std_grid():
    return Grid.standard()


def record_criterion(number: int, description: str, passed: bool) -> None:
    desc, ok = ACCEPTANCE_RESULTS.get(number, (description, True))
    ACCEPTANCE_RESULTS[number] = (desc, ok and passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        desc, ok = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {desc}")
