import numpy as np
import pytest
from hypothesis import strategies as st

from msta.ga import EVEN_CODES, Multivector, split_index
from msta.spin import spinor_from_amplitudes


def random_amplitudes(rng, n):
    a = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return a / np.linalg.norm(a)


def random_spinor(rng, n):
    return spinor_from_amplitudes(random_amplitudes(rng, n))


def random_even(rng, n):
    c = np.zeros(8**n)
    for i in range(8**n):
        if all(code in EVEN_CODES for code in split_index(i, n)):
            c[i] = rng.normal()
    return Multivector(n, c)


def random_mv(rng, n):
    return Multivector(n, rng.normal(size=8**n))


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


ACCEPTANCE_LINES = []


def report_criterion(number, title, ok, detail=""):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
