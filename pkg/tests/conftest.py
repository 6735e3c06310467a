import os

import numpy as np
import pytest

from xcorr.panel import ReturnPanel, standardize

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

# Hand-written 3 x 16 return panel used wherever a small deterministic
# correlated fixture is needed.  Rows are loosely related on purpose.
RAW_3X16 = np.array(
    [
        [0.7, -1.1, 0.4, 2.0, -0.3, 0.9, -1.6, 0.2, 1.1, -0.8, 0.5, -0.2, 1.4, -1.9, 0.6, 0.3],
        [0.5, -0.9, 0.8, 1.6, 0.1, 0.7, -1.2, -0.4, 0.9, -1.1, 0.2, 0.4, 1.0, -1.5, 0.8, -0.1],
        [-0.2, 0.6, -0.5, -1.2, 0.9, -0.4, 1.1, 0.3, -0.7, 1.0, -0.1, 0.6, -0.9, 1.3, -0.6, 0.2],
    ]
)


@pytest.fixture
def prices_small_path():
    return os.path.join(FIXTURES, "prices_small.csv")


@pytest.fixture
def panel_3x16():
    raw = ReturnPanel(
        assets=["AAA", "BBB", "CCC"],
        returns=RAW_3X16.copy(),
        standardized=False,
        bars_per_day=4,
        dt_seconds=300.0,
    )
    return standardize(raw)


@pytest.fixture
def panel_4x64():
    """Four correlated series, long enough for a stable 4x4 eigenproblem."""
    rng = np.random.Generator(np.random.Philox(key=np.array([42, 0], dtype=np.uint64)))
    common = rng.standard_normal(64)
    rows = np.vstack([
        common + 0.8 * rng.standard_normal(64),
        common + 0.9 * rng.standard_normal(64),
        -0.5 * common + rng.standard_normal(64),
        rng.standard_normal(64),
    ])
    raw = ReturnPanel(
        assets=["A", "B", "C", "D"],
        returns=rows,
        standardized=False,
        bars_per_day=8,
        dt_seconds=60.0,
    )
    return standardize(raw)


def make_standard_row(values):
    """Standardize one row exactly like the library does (population std)."""
    v = np.asarray(values, dtype=float)
    return (v - v.mean()) / v.std()
