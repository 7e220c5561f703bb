"""Synthetic linearly separable 13-feature data for tests and demos."""

from __future__ import annotations

import numpy as np

from .data import N_FEATURES, Dataset, SampleRecord


def separable_dataset(n=200, seed=0, background=0.1, spike=2.0):
    """Two-class data separable by the all-ones direction with a wide margin.

    Class-0 rows are low-amplitude uniform noise; class-1 rows add a large
    spike to one random feature. The feature sum then separates the classes
    (sum <= 13 * background for class 0, >= spike for class 1), and the
    spike also shows up as a per-row magnitude outlier, so both linear
    models and the max-pooled conv network can reach 100% accuracy.
    """
    if spike <= N_FEATURES * background:
        raise ValueError("spike must exceed the worst-case background sum")
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        x = rng.uniform(0.0, background, N_FEATURES)
        label = int(rng.integers(2))
        if label:
            x[rng.integers(N_FEATURES)] += spike
        records.append(SampleRecord(tuple(x), label))
    return Dataset(tuple(records), categorical_mask=(False,) * N_FEATURES)
