import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

_CRITERIA_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA_KEY] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record_criterion(request, capsys):
    """Record one ``criterion N: PASS|FAIL`` line for the end-of-run summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        request.config.stash[_CRITERIA_KEY].append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
