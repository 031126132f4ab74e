"""Shared fixtures plus the acceptance-criteria summary reporter."""

import numpy as np
import pytest

# Filled in by tests/test_acceptance.py: criterion number -> (ok, detail).
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict} -- {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(987654321))
