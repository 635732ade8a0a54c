import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from symspin.decomposition import IsotypicDecomposition  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "symspin" / "data"

# acceptance lines collected by test_acceptance and echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def decomp2():
    return IsotypicDecomposition(2, 10, 3)


@pytest.fixture(scope="session")
def decomp3():
    return IsotypicDecomposition(3, 8, 3)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
