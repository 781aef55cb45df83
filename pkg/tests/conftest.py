import warnings

import pytest

from beamlaser.config import RegimeWarning

# Acceptance-criterion outcomes, filled by tests/test_acceptance.py.
ACCEPTANCE_RESULTS: dict[str, str] = {}


def record_acceptance(name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[name] = f"{'PASS' if passed else 'FAIL'}  {detail}"


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    # Paper-scale parameter sets legitimately sit at kappa/(sqrt(N) g) ~ 2,
    # so the regime warning fires on most physics tests.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{name}: {ACCEPTANCE_RESULTS[name]}")
