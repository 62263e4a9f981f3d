"""Pure-numpy implementation of the per-graph network kernels.

Shared math for both backends. Per graph: three propagation layers over the
normalized adjacency `s` (ReLU after the first two, linear third), mean
pooling over node rows, softmax. `sx` is the precomputed product of `s` with
the node feature matrix, so layer 0 is a single matmul.

The compiled backend (`sbag._ckernels`) implements the same functions with
the same signatures; see `sbag.kernels` for selection.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def forward_probs(s, sx, w0, w1, w2):
    """Class-probability vector for one graph."""
    h1 = np.maximum(sx @ w0, 0.0)
    h2 = np.maximum(s @ (h1 @ w1), 0.0)
    z2 = s @ (h2 @ w2)
    return _softmax(z2.mean(axis=0))


def forward_full(s, sx, w0, w1, w2):
    """Forward pass keeping every intermediate activation."""
    z0 = sx @ w0
    h1 = np.maximum(z0, 0.0)
    z1 = s @ (h1 @ w1)
    h2 = np.maximum(z1, 0.0)
    z2 = s @ (h2 @ w2)
    pooled = z2.mean(axis=0)
    probs = _softmax(pooled)
    return probs, z0, h1, z1, h2, z2, pooled


def forward_backward(s, sx, w0, w1, w2, label):
    """Cross-entropy loss and exact weight gradients for one labeled graph.

    Returns (loss, probs, grad_w0, grad_w1, grad_w2). Exploits the exact
    symmetry of `s` so pooling/backprop reduce to right-multiplications.
    """
    probs, z0, h1, z1, h2, _, _ = forward_full(s, sx, w0, w1, w2)
    n = s.shape[0]
    loss = -np.log(probs[label])

    dz = probs.copy()
    dz[label] -= 1.0
    # d(pooled)/d(z2) spreads dz/n to every row; propagating through s gives
    # row i weight rowsum(s)_i / n.
    u2 = np.outer(s.sum(axis=1) / n, dz)
    gw2 = h2.T @ u2
    dz1 = (u2 @ w2.T) * (z1 > 0.0)
    u1 = s @ dz1
    gw1 = h1.T @ u1
    dz0 = (u1 @ w1.T) * (z0 > 0.0)
    gw0 = sx.T @ dz0
    return loss, probs, gw0, gw1, gw2


def batch_loss_grads(tensors, labels, w0, w1, w2):
    """Mean loss and mean gradients over a batch of (s, sx) graph tensors."""
    g0 = np.zeros_like(w0)
    g1 = np.zeros_like(w1)
    g2 = np.zeros_like(w2)
    total = 0.0
    for (s, sx), label in zip(tensors, labels):
        loss, _, a0, a1, a2 = forward_backward(s, sx, w0, w1, w2, label)
        total += loss
        g0 += a0
        g1 += a1
        g2 += a2
    inv = 1.0 / len(labels)
    return total * inv, (g0 * inv, g1 * inv, g2 * inv)
