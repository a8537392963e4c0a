import numpy as np
import pytest
from hypothesis import strategies as st

from superclifford.checks import random_circuit
from superclifford.pauli import BasisOperatorLabel, SuperPauli


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def super_paulis(draw, n=None):
    n = draw(st.integers(1, 4)) if n is None else n
    return SuperPauli(n, draw(st.integers(0, 1)), draw(st.integers(0, 2**n - 1)), draw(st.integers(0, 2**n - 1)))


@st.composite
def circuits(draw, min_n=1, max_n=6, max_len=30):
    """(label, gates) pairs built from a drawn seed so shrinking stays cheap."""
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    length = draw(st.integers(0, max_len))
    r = np.random.default_rng(seed)
    label = BasisOperatorLabel(tuple(int(b) for b in r.integers(0, 2, n)))
    return label, random_circuit(n, length, r)


ACCEPTANCE_LINES: list[str] = []


def report(criterion: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'} [criterion {criterion}] {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
