import numpy as np
import pytest

from zfphase.lti import TransferFunction

import _acceptance


@pytest.fixture
def example_plant():
    return TransferFunction.discrete([1, 0], [1, -1.8, 0.81])


def oshea(xi):
    return TransferFunction.continuous([1, 0, 0], np.polymul([1, 2 * xi, 1], [1, 2 * xi, 1]))


@pytest.fixture
def oshea_plant():
    return oshea(0.25)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _acceptance.RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  ({detail})")
