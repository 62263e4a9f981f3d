"""Backend equivalence: compiled kernels against the numpy reference."""

import numpy as np
import pytest

from sbag import kernels
from sbag.gcn import graph_tensors, init_params

from conftest import random_graph

BACKENDS = kernels.available_backends()


def _case(seed, n=None, d=6, h=8, c=3):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n or int(rng.integers(1, 30)), d, c)
    s, sx = graph_tensors(g, d)
    params = init_params(d, h, c, seed)
    return s, sx, params.weights, g


def test_compiled_backend_present():
    names = [b.BACKEND for b in BACKENDS]
    assert "python" in names
    if len(names) == 1:
        pytest.skip("compiled kernels unavailable in this environment")
    assert "compiled" in names


@pytest.mark.parametrize("seed", range(10))
def test_forward_probs_agree(seed):
    s, sx, (w0, w1, w2), _ = _case(seed)
    results = [b.forward_probs(s, sx, w0, w1, w2) for b in BACKENDS]
    for r in results[1:]:
        np.testing.assert_allclose(r, results[0], rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_forward_backward_agree(seed):
    s, sx, (w0, w1, w2), g = _case(seed)
    results = [b.forward_backward(s, sx, w0, w1, w2, g.label) for b in BACKENDS]
    base = results[0]
    for r in results[1:]:
        assert abs(r[0] - base[0]) < 1e-9
        for a, b in zip(r[1:], base[1:]):
            np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


def test_batch_loss_grads_agree():
    rng = np.random.default_rng(99)
    d, h, c = 5, 8, 2
    graphs = [random_graph(rng, int(rng.integers(1, 20)), d, c, gid=i) for i in range(16)]
    tensors = [graph_tensors(g, d) for g in graphs]
    labels = [g.label for g in graphs]
    w0, w1, w2 = init_params(d, h, c, 5).weights
    results = [b.batch_loss_grads(tensors, labels, w0, w1, w2) for b in BACKENDS]
    base = results[0]
    for loss, grads in results[1:]:
        assert abs(loss - base[0]) < 1e-9
        for a, b in zip(grads, base[1]):
            np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_backend_is_deterministic(backend):
    s, sx, (w0, w1, w2), g = _case(4)
    first = backend.forward_backward(s, sx, w0, w1, w2, g.label)
    second = backend.forward_backward(s, sx, w0, w1, w2, g.label)
    assert first[0] == second[0]
    for a, b in zip(first[1:], second[1:]):
        assert np.array_equal(a, b)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_single_graph_matches_batch_of_one(backend):
    s, sx, (w0, w1, w2), g = _case(8)
    loss, _, g0, g1, g2 = backend.forward_backward(s, sx, w0, w1, w2, g.label)
    bloss, (b0, b1, b2) = backend.batch_loss_grads([(s, sx)], [g.label], w0, w1, w2)
    assert bloss == pytest.approx(loss, abs=1e-15)
    for a, b in ((g0, b0), (g1, b1), (g2, b2)):
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
