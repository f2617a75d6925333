import sys

import numpy as np
import pytest

from lobachevsky.model import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def p13():
    return ModelParams(a=1.0, b=3.0)


@pytest.fixture
def p11():
    return ModelParams(a=1.0, b=1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "REPORT", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.REPORT:
        terminalreporter.write_line(line)
