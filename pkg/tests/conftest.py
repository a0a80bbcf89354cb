import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from apxhom.group_core import GroupSpec  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def finite_specs(draw, max_order=64, max_len=3):
    mods = []
    order = 1
    for _ in range(draw(st.integers(0, max_len))):
        m = draw(st.integers(2, 9))
        if order * m > max_order:
            break
        mods.append(m)
        order *= m
    return GroupSpec(mods)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)
