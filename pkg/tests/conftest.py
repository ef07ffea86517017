import numpy as np
import pytest

from qptm.chromatogram import Chromatogram
from qptm.synth import gulf_families, make_benchmark


def chrom(data, sample_id="s", region="R"):
    return Chromatogram(sample_id, region, np.asarray(data, dtype=float))


@pytest.fixture(scope="session")
def small_bench():
    fams = gulf_families(n_families=3, dims=(96, 60), n_peaks=10, seed=3)
    return make_benchmark(fams, (96, 60), 4)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number, title, ok, elapsed, limit, detail=""):
        ok = bool(ok) and elapsed < limit
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}  [{elapsed:.2f}s / {limit:g}s]  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
