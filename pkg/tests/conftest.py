import os

import numpy as np
import pytest

from cardioseq import data as dp
from cardioseq import synthetic

# Public UCI files are looked up here; tests that need them skip loudly
# when they are absent (they cannot be downloaded in this environment).
DATA_DIR = os.environ.get(
    "CARDIOSEQ_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "data")
)
STATLOG_PATH = os.path.join(DATA_DIR, "heart.dat")
CLEVELAND_PATH = os.path.join(DATA_DIR, "processed.cleveland.data")


def require_file(path, name):
    if not os.path.exists(path):
        pytest.skip(
            f"NOTICE: public {name} file not found at {path}; "
            "place it there (or set CARDIOSEQ_DATA_DIR) to run real-data checks"
        )
    return path


def write_statlog_file(path, dataset):
    """Serialize a fully observed dataset in the statlog dialect."""
    with open(path, "w") as fh:
        for rec in dataset.records:
            fields = " ".join(f"{v:.10g}" for v in rec.features)
            fh.write(f"{fields} {rec.label + 1}\n")


@pytest.fixture(scope="session")
def separable():
    return synthetic.separable_dataset(200, seed=1)


@pytest.fixture()
def tiny_dataset():
    feats = [
        (63, 1, 1, 145, 233, 1, 2, 150, 0, 2.3, 3, 0, 6),
        (67, 1, 4, 160, 286, 0, 2, 108, 1, 1.5, 2, 3, 3),
        (41, 0, 2, 130, 204, 0, 2, 172, 0, 1.4, 1, 0, 3),
        (56, 1, 2, 120, 236, 0, 0, 178, 0, 0.8, 1, 0, 3),
    ]
    labels = [0, 1, 0, 1]
    records = tuple(
        dp.SampleRecord(tuple(float(v) for v in f), y) for f, y in zip(feats, labels)
    )
    return dp.Dataset(records)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
