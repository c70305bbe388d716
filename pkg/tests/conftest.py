import numpy as np
import pytest
from hypothesis import strategies as st

ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20130526)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
complex_scalars = st.builds(complex, finite, finite)


def complex_signals(min_size=1, max_size=16):
    return st.lists(complex_scalars, min_size=min_size, max_size=max_size).map(lambda v: np.array(v, dtype=complex))
