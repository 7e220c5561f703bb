"""Inspect the network's building blocks: multi-width convolution with zero
same-padding, ReLU, max pooling, the dense head and softmax, and confirm the
analytic gradients against finite differences.

Run: python3 demos/02_network.py
"""

import numpy as np

from cardioseq import network as nn
from cardioseq import training as tr

rng = np.random.default_rng(0)

# A width-3 kernel slid over a short sequence; padding keeps the length.
kernel = nn.ConvKernel(np.array([1.0, 1.0, 1.0]), bias=0.0)
out = nn.conv_forward(np.array([1.0, 0.0, 2.0, 0.0, 1.0]), kernel)
print(f"conv([1,0,2,0,1], ones(3)) = {out}")

print(f"relu([-1, 0, 2]) = {nn.relu(np.array([-1.0, 0.0, 2.0]))}")
value, idx = nn.max_pool(np.array([1.0, 5.0, 3.0]))
print(f"global max pool of [1,5,3] -> value {value} at index {idx}")
print(f"softmax([ln1, ln3]) = {nn.softmax([np.log(1.0), np.log(3.0)])}")

# Full forward pass: 8 kernels per width over a random standardized sample.
params = nn.init_params(8, rng)
x = rng.standard_normal((13, 1))
probs, _ = nn.model_forward(x, params)
print(f"\nclass probabilities for a random input: {probs} (sum {probs.sum()})")

# Gradient check: every analytic gradient vs central finite differences.
small = nn.init_params(2, rng)
X = rng.standard_normal((4, 13))
y = rng.integers(0, 2, size=4)
_, cache = nn.forward_batch(X, small, train=True)
grads = nn.model_backward(cache, small, y)

h = 1e-5
worst = 0.0
for name, a in small.tensors().items():
    it = np.nditer(a, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        orig = a[i]
        a[i] = orig + h
        lp = tr.batch_loss(small, X, y)[0]
        a[i] = orig - h
        lm = tr.batch_loss(small, X, y)[0]
        a[i] = orig
        fd = (lp - lm) / (2 * h)
        denom = max(abs(fd), abs(grads[name][i]), 1e-8)
        worst = max(worst, abs(fd - grads[name][i]) / denom)
print(f"worst relative gradient error vs finite differences: {worst:.2e}")
