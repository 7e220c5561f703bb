"""Forward and backward passes of the multi-width 1D conv network.

Architecture: the 13x1 standardized feature column is convolved with banks
of width-1, width-3 and width-5 kernels (stride 1, zero same-padding, so
every feature map has length 13), passed through ReLU, max-pooled, the
pooled values concatenated in fixed order (width 1 bank, then 3, then 5;
kernel index ascending), optionally dropped out (inverted dropout), and
fed to a dense layer with a 2-class softmax head.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import N_FEATURES
from .errors import (
    DimensionMismatchError,
    EmptyMapError,
    ShapeMismatchError,
    StaleCacheError,
)

KERNEL_WIDTHS = (1, 3, 5)

GLOBAL_POOL = ("global",)


def parse_pool_mode(text):
    """Parse 'global' or 'windowed:<size>:<stride>' into a pool-mode tuple."""
    if text == "global":
        return GLOBAL_POOL
    if text.startswith("windowed:"):
        _, size, stride = text.split(":")
        return ("windowed", int(size), int(stride))
    raise ValueError(f"unknown pool mode {text!r}")


def format_pool_mode(mode):
    if mode == GLOBAL_POOL:
        return "global"
    return f"windowed:{mode[1]}:{mode[2]}"


@dataclass(frozen=True)
class ConvKernel:
    """A width-y (y odd), height-1 kernel with a scalar bias."""

    weights: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1 or w.size % 2 == 0:
            raise ShapeMismatchError("kernel width must be odd and >= 1")
        if not np.all(np.isfinite(w)) or not np.isfinite(self.bias):
            raise ShapeMismatchError("kernel parameters must be finite")
        object.__setattr__(self, "weights", w)

    @property
    def width(self):
        return self.weights.size


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray  # (outputs, inputs)
    biases: np.ndarray  # (outputs,)

    def __post_init__(self):
        if self.weights.shape[0] != self.biases.shape[0]:
            raise ShapeMismatchError("dense weight rows must match bias count")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise ShapeMismatchError("dense parameters must be finite")


@dataclass
class ModelParams:
    """Trainable state: one kernel bank per width plus the dense head.

    conv_w[w] is (K, w), conv_b[w] is (K,); dense_w is (2, pooled_dim).
    """

    conv_w: dict
    conv_b: dict
    dense_w: np.ndarray
    dense_b: np.ndarray

    def tensors(self):
        """Named parameter tensors in a fixed canonical order."""
        out = {}
        for w in KERNEL_WIDTHS:
            out[f"conv_w{w}"] = self.conv_w[w]
            out[f"conv_b{w}"] = self.conv_b[w]
        out["dense_w"] = self.dense_w
        out["dense_b"] = self.dense_b
        return out

    @classmethod
    def from_tensors(cls, tensors):
        return cls(
            conv_w={w: tensors[f"conv_w{w}"] for w in KERNEL_WIDTHS},
            conv_b={w: tensors[f"conv_b{w}"] for w in KERNEL_WIDTHS},
            dense_w=tensors["dense_w"],
            dense_b=tensors["dense_b"],
        )

    def copy(self):
        return ModelParams.from_tensors(
            {k: v.copy() for k, v in self.tensors().items()}
        )

    @property
    def kernels_per_width(self):
        return self.conv_w[KERNEL_WIDTHS[0]].shape[0]


@dataclass
class ForwardCache:
    """Everything the reverse pass needs, produced by a train-mode forward."""

    params: ModelParams
    inputs: np.ndarray  # (B, 13)
    pre: dict = field(default_factory=dict)  # width -> (B, K, 13)
    pool_idx: dict = field(default_factory=dict)  # width -> (B, K, W)
    pooled: np.ndarray = None  # (B, D) pre-dropout concatenation
    dropout_mask: np.ndarray = None  # (B, D) or None
    dropout_rate: float = 0.0
    dropped: np.ndarray = None  # (B, D) dense input
    probs: np.ndarray = None  # (B, 2)


def _glorot_uniform(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def pooled_dim(kernels_per_width, pool_mode):
    return len(KERNEL_WIDTHS) * kernels_per_width * n_pool_windows(pool_mode)


def n_pool_windows(pool_mode, length=N_FEATURES):
    size, stride = _pool_geometry(pool_mode, length)
    return (length - size) // stride + 1


def _pool_geometry(pool_mode, length):
    if pool_mode[0] == "global":
        return length, length
    return pool_mode[1], pool_mode[2]


def init_params(kernels_per_width, rng, pool_mode=GLOBAL_POOL, n_classes=2):
    """Glorot-uniform weights from the given generator, zero biases."""
    conv_w, conv_b = {}, {}
    for w in KERNEL_WIDTHS:
        conv_w[w] = _glorot_uniform(rng, (kernels_per_width, w), w, w)
        conv_b[w] = np.zeros(kernels_per_width)
    d = pooled_dim(kernels_per_width, pool_mode)
    dense_w = _glorot_uniform(rng, (n_classes, d), d, n_classes)
    dense_b = np.zeros(n_classes)
    return ModelParams(conv_w, conv_b, dense_w, dense_b)


def _conv_windows(inputs, width):
    """Zero same-padded sliding windows: (B, 13) -> (B, 13, width)."""
    pad = (width - 1) // 2
    padded = np.pad(inputs, ((0, 0), (pad, pad)))
    return np.lib.stride_tricks.sliding_window_view(padded, width, axis=1)


def conv_forward(feature_matrix, kernel):
    """Pre-activation feature map for a single kernel (spec op surface).

    Stride 1, zero same-padding, so the output length equals the input
    length (13 for real samples).
    """
    x = np.asarray(feature_matrix, dtype=float).reshape(1, -1)
    windows = _conv_windows(x, kernel.width)
    return windows[0] @ kernel.weights + kernel.bias


def relu(pre):
    return np.maximum(0.0, pre)


def max_pool(feature_map, mode=GLOBAL_POOL):
    """Max pooling over a 1D map; returns (pooled values, argmax indices).

    Global mode returns scalars. Ties break toward the lowest index.
    """
    m = np.asarray(feature_map, dtype=float)
    if m.size == 0:
        raise EmptyMapError("cannot pool an empty feature map")
    size, stride = _pool_geometry(mode, m.size)
    starts = range(0, m.size - size + 1, stride)
    pooled = np.array([m[s : s + size].max() for s in starts])
    idx = np.array([s + int(np.argmax(m[s : s + size])) for s in starts])
    if mode[0] == "global":
        return pooled[0], int(idx[0])
    return pooled, idx


def dense_forward(inputs, layer):
    x = np.asarray(inputs, dtype=float)
    if x.shape[-1] != layer.weights.shape[1]:
        raise DimensionMismatchError(
            f"dense expects {layer.weights.shape[1]} inputs, got {x.shape[-1]}"
        )
    return x @ layer.weights.T + layer.biases


def softmax(logits):
    """Numerically stable softmax (max subtraction), rows sum to 1."""
    z = np.asarray(logits, dtype=float)
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _pool_batch(maps, pool_mode):
    """(B, K, T) -> pooled (B, K, W) and argmax indices (B, K, W)."""
    T = maps.shape[2]
    size, stride = _pool_geometry(pool_mode, T)
    starts = list(range(0, T - size + 1, stride))
    pooled = np.empty(maps.shape[:2] + (len(starts),))
    idx = np.empty(maps.shape[:2] + (len(starts),), dtype=np.int64)
    for wi, s in enumerate(starts):
        seg = maps[:, :, s : s + size]
        local = seg.argmax(axis=2)
        pooled[:, :, wi] = np.take_along_axis(seg, local[:, :, None], axis=2)[:, :, 0]
        idx[:, :, wi] = local + s
    return pooled, idx


def forward_batch(inputs, params, dropout_rate=0.0, rng=None, train=False,
                  pool_mode=GLOBAL_POOL):
    """Run the full network on a (B, 13) batch.

    Returns (probs, cache); the cache is only fully populated in train mode.
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    cache = ForwardCache(params=params, inputs=X, dropout_rate=dropout_rate)
    pooled_parts = []
    for w in KERNEL_WIDTHS:
        windows = _conv_windows(X, w)  # (B, 13, w)
        pre = np.einsum("btw,kw->bkt", windows, params.conv_w[w]) + params.conv_b[w][None, :, None]
        act = relu(pre)
        pooled, idx = _pool_batch(act, pool_mode)
        cache.pre[w] = pre
        cache.pool_idx[w] = idx
        pooled_parts.append(pooled.reshape(X.shape[0], -1))
    z = np.concatenate(pooled_parts, axis=1)
    cache.pooled = z
    if train and dropout_rate > 0.0:
        if rng is None:
            raise ValueError("train-mode dropout requires a generator")
        mask = rng.random(z.shape) >= dropout_rate
        z = z * mask / (1.0 - dropout_rate)
        cache.dropout_mask = mask
    cache.dropped = z
    logits = z @ params.dense_w.T + params.dense_b
    probs = softmax(logits)
    cache.probs = probs
    return probs, cache


def model_forward(feature_matrix, params, dropout_rate=0.0, rng=None,
                  mode="infer", pool_mode=GLOBAL_POOL):
    """Single-sample forward pass over a 13x1 feature matrix."""
    x = np.asarray(feature_matrix, dtype=float).reshape(1, N_FEATURES)
    probs, cache = forward_batch(
        x, params, dropout_rate=dropout_rate, rng=rng,
        train=(mode == "train"), pool_mode=pool_mode,
    )
    return probs[0], cache


def model_backward(cache, params, labels, pool_mode=GLOBAL_POOL):
    """Exact mean-cross-entropy gradients for every parameter tensor.

    The incoming cache must come from a forward pass on the same params
    object; anything else means the parameters moved under the cache.
    """
    if cache.params is not params:
        raise StaleCacheError("cache was produced for different parameters")
    X = cache.inputs
    B = X.shape[0]
    y = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if y.shape[0] != B:
        raise ShapeMismatchError("label count does not match batch size")

    # Combined softmax + cross-entropy gradient, averaged over the batch.
    dlogits = cache.probs.copy()
    dlogits[np.arange(B), y] -= 1.0
    dlogits /= B

    grads = {
        "dense_w": dlogits.T @ cache.dropped,
        "dense_b": dlogits.sum(axis=0),
    }
    dz = dlogits @ params.dense_w
    if cache.dropout_mask is not None:
        dz = dz * cache.dropout_mask / (1.0 - cache.dropout_rate)

    K = params.kernels_per_width
    W = n_pool_windows(pool_mode)
    offset = 0
    for w in KERNEL_WIDTHS:
        dpool = dz[:, offset : offset + K * W].reshape(B, K, W)
        offset += K * W
        dmap = np.zeros_like(cache.pre[w])
        # accumulate per window: overlapping windows can share an argmax
        b_ix = np.arange(B)[:, None]
        k_ix = np.arange(K)[None, :]
        for wi in range(W):
            dmap[b_ix, k_ix, cache.pool_idx[w][:, :, wi]] += dpool[:, :, wi]
        dpre = dmap * (cache.pre[w] > 0)
        windows = _conv_windows(X, w)
        grads[f"conv_w{w}"] = np.einsum("bkt,btw->kw", dpre, windows)
        grads[f"conv_b{w}"] = dpre.sum(axis=(0, 2))
    return grads
