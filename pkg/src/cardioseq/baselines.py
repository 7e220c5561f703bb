"""Comparison baselines: dummy-variable logistic regression and a
particle-swarm-optimized extreme learning machine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve

from . import data as dp
from .errors import (
    ArityMismatchError,
    NonFiniteInputError,
    SingleClassDataError,
)

# Standard constriction-coefficient PSO settings.
PSO_INERTIA = 0.729
PSO_COGNITIVE = 1.49445
PSO_SOCIAL = 1.49445

ELM_RIDGE = 1e-6


def _sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# ---------------------------------------------------------------------------
# Dummy-variable logistic regression
# ---------------------------------------------------------------------------

@dataclass
class DummyEncoder:
    """Reference-category dummy coding for categorical columns, Z-score for
    numeric ones. Unseen test categories map to all-zero indicators."""

    categories: dict  # column index -> sorted observed category values
    numeric_mean: np.ndarray
    numeric_std: np.ndarray
    categorical_mask: tuple

    @property
    def width(self):
        w = 0
        for j, is_cat in enumerate(self.categorical_mask):
            w += len(self.categories[j]) - 1 if is_cat else 1
        return w

    def transform(self, raw):
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        cols = []
        for j, is_cat in enumerate(self.categorical_mask):
            if is_cat:
                # first observed category is the reference; a single-category
                # column contributes nothing (it carries no information)
                for c in self.categories[j][1:]:
                    cols.append((raw[:, j] == c).astype(float))
            else:
                std = self.numeric_std[j] if self.numeric_std[j] > 0 else 1.0
                cols.append((raw[:, j] - self.numeric_mean[j]) / std)
        return np.column_stack(cols)


def fit_dummy_encoder(dataset):
    raw = dataset.feature_array()
    if np.isnan(raw).any():
        raise ArityMismatchError("impute before encoding")
    categories = {}
    for j, is_cat in enumerate(dataset.categorical_mask):
        categories[j] = sorted(set(raw[:, j].tolist())) if is_cat else []
    return DummyEncoder(
        categories=categories,
        numeric_mean=raw.mean(axis=0),
        numeric_std=raw.std(axis=0),
        categorical_mask=dataset.categorical_mask,
    )


def dummy_encode(dataset, encoder=None):
    """Dataset -> (design matrix, encoder). Fits the encoder when not given."""
    if encoder is None:
        encoder = fit_dummy_encoder(dataset)
    return encoder.transform(dataset.feature_array()), encoder


@dataclass
class DvLogisticModel:
    encoder: DummyEncoder
    weights: np.ndarray
    bias: float
    fill_values: np.ndarray

    def scores(self, dataset):
        imputed = dp.impute_with_values(dataset, self.fill_values)
        X = self.encoder.transform(imputed.feature_array())
        return _sigmoid(X @ self.weights + self.bias)

    def predict_batch(self, dataset):
        return (self.scores(dataset) > 0.5).astype(np.int64)


def dv_logistic_train(dataset, lr=0.1, epochs=2000, seed=0):
    """Full-batch gradient descent on mean binary cross-entropy over the
    dummy-encoded design matrix. Weights start at zero, so the fit is
    deterministic; the seed is kept for interface symmetry."""
    y = dataset.labels
    if len(set(y.tolist())) < 2:
        raise SingleClassDataError("both classes required")
    fills = dp.fill_values(dataset)
    imputed = dp.impute_with_values(dataset, fills)
    X, encoder = dummy_encode(imputed)
    w = np.zeros(X.shape[1])
    b = 0.0
    n = X.shape[0]
    for _ in range(epochs):
        p = _sigmoid(X @ w + b)
        err = p - y
        w -= lr * (X.T @ err) / n
        b -= lr * err.mean()
    return DvLogisticModel(encoder=encoder, weights=w, bias=b, fill_values=fills)


# ---------------------------------------------------------------------------
# PSO-optimized extreme learning machine
# ---------------------------------------------------------------------------

@dataclass
class ElmModel:
    hidden_weights: np.ndarray  # (13, H), fixed after optimization
    hidden_biases: np.ndarray  # (H,)
    output_weights: np.ndarray  # (H, 2), closed-form least squares
    fill_values: np.ndarray
    scaler: dp.ScalerStats
    ridge: float = ELM_RIDGE
    gbest_history: list = field(default_factory=list)
    max_solve_residual: float = 0.0

    def _activations(self, X):
        return _sigmoid(X @ self.hidden_weights + self.hidden_biases)

    def outputs(self, dataset):
        imputed = dp.impute_with_values(dataset, self.fill_values)
        X = dp.scale_values(imputed.feature_array(), self.scaler)
        return self._activations(X) @ self.output_weights

    def predict_batch(self, dataset):
        out = self.outputs(dataset)
        # strict > keeps exact ties at class 0
        return (out[:, 1] > out[:, 0]).astype(np.int64)


def elm_solve_output(hidden_activations, targets, ridge=ELM_RIDGE):
    """Ridge least squares: solve (HᵀH + λI) W = HᵀY with an SPD solver."""
    H = np.asarray(hidden_activations, dtype=float)
    Y = np.asarray(targets, dtype=float)
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(Y))):
        raise NonFiniteInputError("hidden activations and targets must be finite")
    A = H.T @ H + ridge * np.eye(H.shape[1])
    B = H.T @ Y
    return solve(A, B, assume_a="pos")


def solve_residual(hidden_activations, targets, ridge, output_weights):
    """Max-norm residual of the ridge normal equations for a given solution."""
    H = np.asarray(hidden_activations, dtype=float)
    Y = np.asarray(targets, dtype=float)
    A = H.T @ H + ridge * np.eye(H.shape[1])
    return float(np.abs(A @ output_weights - H.T @ Y).max())


def _one_hot(y, n_classes=2):
    out = np.zeros((y.shape[0], n_classes))
    out[np.arange(y.shape[0]), y] = 1.0
    return out


def _stratified_holdout(y, frac, rng):
    fit_idx, val_idx = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = idx[rng.permutation(idx.size)]
        n_val = max(1, int(round(idx.size * frac)))
        val_idx.extend(idx[:n_val].tolist())
        fit_idx.extend(idx[n_val:].tolist())
    return np.array(sorted(fit_idx)), np.array(sorted(val_idx))


def pso_elm_train(dataset, hidden_size=32, swarm_size=20, iterations=50,
                  seed=0, ridge=ELM_RIDGE, inertia=PSO_INERTIA,
                  cognitive=PSO_COGNITIVE, social=PSO_SOCIAL):
    """Optimize the ELM's hidden weights/biases with a particle swarm.

    Fitness is validation accuracy on an internal seeded 80/20 split after
    the closed-form output solve on the fit part; the winning hidden
    parameters are refit on all rows before returning.
    """
    y = dataset.labels
    if len(set(y.tolist())) < 2:
        raise SingleClassDataError("both classes required")
    fills = dp.fill_values(dataset)
    imputed = dp.impute_with_values(dataset, fills)
    scaler = dp.fit_scaler(imputed)
    X = dp.scale_values(imputed.feature_array(), scaler)

    rng = np.random.default_rng(seed)
    fit_idx, val_idx = _stratified_holdout(y, 0.2, rng)
    X_fit, y_fit = X[fit_idx], y[fit_idx]
    X_val, y_val = X[val_idx], y[val_idx]
    Y_fit = _one_hot(y_fit)

    dim = dp.N_FEATURES * hidden_size + hidden_size
    residuals = []

    def unpack(position):
        W = position[: dp.N_FEATURES * hidden_size].reshape(dp.N_FEATURES, hidden_size)
        b = position[dp.N_FEATURES * hidden_size :]
        return W, b

    def fitness(position):
        W, b = unpack(position)
        H_fit = _sigmoid(X_fit @ W + b)
        out_w = elm_solve_output(H_fit, Y_fit, ridge)
        residuals.append(solve_residual(H_fit, Y_fit, ridge, out_w))
        scores = _sigmoid(X_val @ W + b) @ out_w
        pred = (scores[:, 1] > scores[:, 0]).astype(np.int64)
        return float(np.mean(pred == y_val))

    bound = 1.0
    v_max = 0.5 * bound
    positions = rng.uniform(-bound, bound, size=(swarm_size, dim))
    velocities = np.zeros((swarm_size, dim))
    pbest = positions.copy()
    pbest_fit = np.array([fitness(p) for p in positions])
    g = int(pbest_fit.argmax())
    gbest = pbest[g].copy()
    gbest_fit = float(pbest_fit[g])
    history = [gbest_fit]

    for _ in range(iterations):
        r1 = rng.random((swarm_size, dim))
        r2 = rng.random((swarm_size, dim))
        velocities = (
            inertia * velocities
            + cognitive * r1 * (pbest - positions)
            + social * r2 * (gbest - positions)
        )
        np.clip(velocities, -v_max, v_max, out=velocities)
        positions = positions + velocities
        # best updates in canonical particle order keeps runs deterministic
        for i in range(swarm_size):
            f = fitness(positions[i])
            if f > pbest_fit[i]:
                pbest_fit[i] = f
                pbest[i] = positions[i].copy()
                if f > gbest_fit:
                    gbest_fit = f
                    gbest = positions[i].copy()
        history.append(gbest_fit)

    W, b = unpack(gbest)
    H_all = _sigmoid(X @ W + b)
    Y_all = _one_hot(y)
    out_w = elm_solve_output(H_all, Y_all, ridge)
    residuals.append(solve_residual(H_all, Y_all, ridge, out_w))
    return ElmModel(
        hidden_weights=W, hidden_biases=b, output_weights=out_w,
        fill_values=fills, scaler=scaler, ridge=ridge,
        gbest_history=history, max_solve_residual=max(residuals),
    )


def baseline_predict(model, record):
    """Classify one record with either baseline; ties resolve to class 0."""
    if len(record.features) != dp.N_FEATURES:
        raise ArityMismatchError("record must have 13 features")
    single = dp.Dataset((dp.SampleRecord(tuple(record.features), record.label),))
    if isinstance(model, DvLogisticModel):
        score = float(model.scores(single)[0])
        return (1 if score > 0.5 else 0), score
    out = model.outputs(single)[0]
    return (1 if out[1] > out[0] else 0), out
