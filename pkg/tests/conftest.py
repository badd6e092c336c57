import itertools

import numpy as np
import pytest

from evoscape.maxsat import InstanceSpec, MaxSatLandscape, generate


def truth_table_count(clauses, bits):
    """Satisfied clauses by direct per-clause truth check (test oracle)."""
    return sum(any((int(bits[abs(l) - 1]) == 1) == (l > 0) for l in c) for c in clauses)


def all_bitstrings(n):
    return [np.array(b, dtype=np.uint8) for b in itertools.product((0, 1), repeat=n)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sat16():
    return MaxSatLandscape(generate(InstanceSpec(16, 39, 3, seed=7)))


@pytest.fixture
def sat64():
    return MaxSatLandscape(generate(InstanceSpec(64, 275, 3, seed=11)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
