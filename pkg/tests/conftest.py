import numpy as np
import pytest

from ctrlscape.sampling import SeededStream

ACCEPTANCE_LINES = []


@pytest.fixture
def stream():
    """Fresh deterministic stream per test; call with an id for more."""
    def make(stream_id=0, seed=20240601):
        return SeededStream(seed, stream_id)
    return make


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}" + (
            f"  [{detail}]" if detail else "")
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


def random_symmetric(rng, n):
    A = rng.standard_normal((n, n))
    return (A + A.T) / 2


def max_abs(M):
    return float(np.max(np.abs(M)))
