import os

import numpy as np
import pytest

RUN_SLOW = os.environ.get("INARGOF_SLOW", "") not in ("", "0")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="long Monte Carlo run; set INARGOF_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


class _Recorder:
    def __init__(self, lines, label):
        self.lines = lines
        self.label = label
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        self.lines.append(f"[{status}] {self.label}" + (f": {self.detail}" if self.detail else ""))
        return False


_ACCEPTANCE: list = []


class _Criteria:
    def __call__(self, label):
        return _Recorder(_ACCEPTANCE, label)

    def excluded(self, label, reason):
        _ACCEPTANCE.append(f"[EXCLUDED] {label}: {reason}")


@pytest.fixture
def criterion():
    """``with criterion("label") as rec: rec.detail = ...; assert ...`` logs one PASS/FAIL line."""
    return _Criteria()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
