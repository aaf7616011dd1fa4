import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("qdiv", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qdiv")

# fixed non-commuting faithful qutrit pair shared by several modules
QUTRIT_A = np.array([[0.5, 0.1, 0], [0.1, 0.3, 0.05], [0, 0.05, 0.2]], dtype=complex)
QUTRIT_B = np.array([[0.2, 0, 0.1j], [0, 0.3, 0.05], [-0.1j, 0.05, 0.5]], dtype=complex)


@pytest.fixture
def qutrit_pair():
    return QUTRIT_A.copy(), QUTRIT_B.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
