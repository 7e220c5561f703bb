"""Dataset parsing, imputation, Z-score standardization and feature matrices.

Supports the two public UCI heart-disease file dialects:

* statlog: 13 whitespace-separated numeric attributes plus a class token
  in {1, 2}; labels are remapped 1 -> 0 (absence), 2 -> 1 (presence).
* cleveland: 14 comma-separated fields, ``?`` marks a missing value, the
  last field is in {0..4} and is binarized (0 -> 0, 1..4 -> 1).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllMissingColumnError,
    ArityMismatchError,
    EmptyDatasetError,
    MalformedRowError,
    MissingValueError,
    UnknownLabelError,
)

N_FEATURES = 13

FEATURE_NAMES = (
    "age", "sex", "cp", "trestbps", "chol", "fbs", "restecg",
    "thalach", "exang", "oldpeak", "slope", "ca", "thal",
)

# Features conventionally treated as categorical in this dataset family.
CATEGORICAL_FEATURES = frozenset(
    {"sex", "cp", "fbs", "restecg", "exang", "slope", "ca", "thal"}
)

DEFAULT_CATEGORICAL_MASK = tuple(n in CATEGORICAL_FEATURES for n in FEATURE_NAMES)


@dataclass(frozen=True)
class SampleRecord:
    """One subject: 13 clinical features (None = missing) and a binary label."""

    features: tuple
    label: int

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise ArityMismatchError(
                f"expected {N_FEATURES} features, got {len(self.features)}"
            )
        if self.label not in (0, 1):
            raise ArityMismatchError(f"label must be 0 or 1, got {self.label}")

    @property
    def has_missing(self):
        return any(v is None for v in self.features)


@dataclass(frozen=True)
class Dataset:
    records: tuple
    feature_names: tuple = FEATURE_NAMES
    categorical_mask: tuple = DEFAULT_CATEGORICAL_MASK

    def __len__(self):
        return len(self.records)

    @property
    def labels(self):
        return np.array([r.label for r in self.records], dtype=np.int64)

    def feature_array(self):
        """All features as an (n, 13) float array with NaN for missing."""
        out = np.full((len(self.records), N_FEATURES), np.nan)
        for i, rec in enumerate(self.records):
            for j, v in enumerate(rec.features):
                if v is not None:
                    out[i, j] = v
        return out

    @property
    def has_missing(self):
        return any(r.has_missing for r in self.records)

    def replace_records(self, records):
        return Dataset(tuple(records), self.feature_names, self.categorical_mask)

    def subset(self, indices):
        return self.replace_records(self.records[i] for i in indices)


@dataclass(frozen=True)
class ImputationPolicy:
    numeric_rule: str = "column-mean"
    categorical_rule: str = "column-mode"


@dataclass(frozen=True)
class ScalerStats:
    """Per-column population mean/std; constant columns are flagged."""

    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray

    def __post_init__(self):
        if np.any(self.std < 0):
            raise ArityMismatchError("standard deviations must be non-negative")


def _parse_statlog_row(tokens, line_no):
    values = []
    for tok in tokens[:-1]:
        try:
            values.append(float(tok))
        except ValueError:
            raise MalformedRowError(line_no, f"unparseable token {tok!r}")
    raw_label = tokens[-1]
    if raw_label not in ("1", "2", "1.0", "2.0"):
        raise UnknownLabelError(line_no, f"unknown statlog label {raw_label!r}")
    return tuple(values), int(float(raw_label)) - 1


def _parse_cleveland_row(tokens, line_no):
    values = []
    for tok in tokens[:-1]:
        tok = tok.strip()
        if tok == "?":
            values.append(None)
            continue
        try:
            values.append(float(tok))
        except ValueError:
            raise MalformedRowError(line_no, f"unparseable token {tok!r}")
    raw_label = tokens[-1].strip()
    try:
        level = int(float(raw_label))
    except ValueError:
        raise UnknownLabelError(line_no, f"unparseable label {raw_label!r}")
    if level not in (0, 1, 2, 3, 4):
        raise UnknownLabelError(line_no, f"cleveland label out of range: {level}")
    return tuple(values), int(level > 0)


def parse_dataset(path, dialect):
    """Parse a heart-disease file into a Dataset.

    Every non-empty line either yields a record or raises a located
    MalformedRowError; rows are never silently skipped.
    """
    if dialect not in ("statlog", "cleveland"):
        raise ValueError(f"unknown dialect {dialect!r}")
    records = []
    with open(path, encoding="ascii", errors="replace") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split() if dialect == "statlog" else line.split(",")
            if len(tokens) != N_FEATURES + 1:
                raise MalformedRowError(
                    line_no, f"expected {N_FEATURES + 1} fields, got {len(tokens)}"
                )
            if dialect == "statlog":
                features, label = _parse_statlog_row(tokens, line_no)
            else:
                features, label = _parse_cleveland_row(tokens, line_no)
            records.append(SampleRecord(features, label))
    if not records:
        raise EmptyDatasetError(f"no records in {path}")
    return Dataset(tuple(records))


def fill_values(stats_source, policy=ImputationPolicy(), categorical_mask=None):
    """Per-column fill values: mean of observed values for numeric columns,
    mode (smallest value on ties) for categorical ones.

    Statistics come from stats_source only, so fitting on a training split
    and applying elsewhere never leaks test information.
    """
    if categorical_mask is None:
        categorical_mask = stats_source.categorical_mask
    raw = stats_source.feature_array()
    fills = np.empty(N_FEATURES)
    for j in range(N_FEATURES):
        observed = raw[~np.isnan(raw[:, j]), j]
        if observed.size == 0:
            raise AllMissingColumnError(
                f"column {stats_source.feature_names[j]!r} has no observed values"
            )
        if categorical_mask[j]:
            counts = Counter(observed.tolist())
            best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
            fills[j] = best[0]
        else:
            fills[j] = observed.mean()
    return fills


def impute_with_values(data, fills):
    """Replace missing entries with the given per-column fill values."""
    if len(fills) != N_FEATURES:
        raise ArityMismatchError("fill values must have 13 entries")
    out = []
    for rec in data.records:
        if not rec.has_missing:
            out.append(rec)
            continue
        feats = tuple(
            fills[j] if v is None else v for j, v in enumerate(rec.features)
        )
        out.append(SampleRecord(feats, rec.label))
    return data.replace_records(out)


def impute_missing(data, policy=ImputationPolicy(), stats_source=None):
    """Fill missing values using statistics from stats_source (default: data)."""
    if stats_source is None:
        stats_source = data
    if not data.has_missing:
        return data
    return impute_with_values(data, fill_values(stats_source, policy, data.categorical_mask))


def fit_scaler(data):
    """Population mean/std per column of a fully imputed dataset."""
    if len(data) == 0:
        raise EmptyDatasetError("cannot fit a scaler on an empty dataset")
    if data.has_missing:
        raise MissingValueError("impute before fitting the scaler")
    raw = data.feature_array()
    mean = raw.mean(axis=0)
    std = raw.std(axis=0)  # population (divide-by-N) convention
    return ScalerStats(mean=mean, std=std, constant=std == 0.0)


def apply_scaler(data, stats):
    """Z-score each column; constant columns (std = 0) map to 0."""
    if data.has_missing:
        raise MissingValueError("impute before scaling")
    if stats.mean.shape != (N_FEATURES,):
        raise ArityMismatchError("scaler arity does not match dataset")
    raw = data.feature_array()
    safe_std = np.where(stats.constant, 1.0, stats.std)
    scaled = (raw - stats.mean) / safe_std
    scaled[:, stats.constant] = 0.0
    out = [
        SampleRecord(tuple(scaled[i]), rec.label)
        for i, rec in enumerate(data.records)
    ]
    return data.replace_records(out)


def scale_values(values, stats):
    """Z-score a raw (n, 13) array with fitted statistics."""
    safe_std = np.where(stats.constant, 1.0, stats.std)
    scaled = (np.asarray(values, dtype=float) - stats.mean) / safe_std
    scaled[..., stats.constant] = 0.0
    return scaled


def to_feature_matrix(record):
    """13x1 single-channel column matrix, feature order preserved."""
    if record.has_missing:
        raise MissingValueError("record has missing values; impute first")
    return np.array(record.features, dtype=float).reshape(N_FEATURES, 1)


def save_scaler(path, stats, feature_names=FEATURE_NAMES):
    with open(path, "w", encoding="ascii") as fh:
        for name, m, s in zip(feature_names, stats.mean, stats.std):
            fh.write(f"{name} {m:.17g} {s:.17g}\n")


def load_scaler(path):
    names, means, stds = [], [], []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if not line.strip():
                continue
            name, m, s = line.split()
            names.append(name)
            means.append(float(m))
            stds.append(float(s))
    if len(names) != N_FEATURES:
        raise ArityMismatchError(f"scaler file has {len(names)} rows, expected {N_FEATURES}")
    mean = np.array(means)
    std = np.array(stds)
    return ScalerStats(mean=mean, std=std, constant=std == 0.0)
