import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ctx13():
    from crtbp_resonance.return_map import ResonanceContext

    return ResonanceContext(1, 3, 0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""

    def rec(tag, ok, detail):
        ACCEPTANCE_LINES.append(f"{tag}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return rec


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
