import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from outrank.io import load_bundled_problem
from outrank.smaa import SamplingConfig, run_smaa


@pytest.fixture(scope="session")
def bundled():
    return load_bundled_problem()


@pytest.fixture(scope="session")
def run1000(bundled):
    return run_smaa(bundled, SamplingConfig(sample_count=1000, master_seed=2026))


@pytest.fixture(scope="session")
def run10000(bundled):
    return run_smaa(bundled, SamplingConfig(sample_count=10_000, master_seed=7))


def pct(report, node, matrix, a, b):
    """Frequency in percent of a relation cell, exact from counts."""
    node_report = report.nodes[node]
    alts = report.alternatives
    counts = {
        "P": node_report.preference_counts,
        "I": node_report.indifference_counts,
        "R": node_report.incomparability_counts,
    }[matrix]
    i, j = alts.index(a), alts.index(b)
    return 100.0 * counts[i][j] / report.sample_count
