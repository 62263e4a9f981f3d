#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the fused batch forward/backward (the training hot loop) and the
forward-only pass (prediction/scoring) on batches shaped like each
benchmark's graphs, and cross-checks that both backends agree numerically.

Run:  python benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from sbag import _pykernels
from sbag.gcn import graph_tensors, init_params
from sbag.graphs import Graph

try:
    from sbag import _ckernels
except ImportError:
    _ckernels = None

SHAPES = [
    # name, nodes, node classes, graph classes
    ("AIDS-like", 16, 38, 2),
    ("NCI1-like", 30, 37, 2),
    ("PROTEINS-like", 39, 3, 2),
    ("ENZYMES-like", 33, 3, 6),
]


def make_batch(n, d, c, batch=32, seed=0):
    rng = np.random.default_rng(seed)
    tensors, labels = [], []
    for gid in range(batch):
        classes = tuple(int(x) for x in rng.integers(0, d, n))
        edges = tuple(sorted((int(rng.integers(0, i)), i) for i in range(1, n)))
        tensors.append(graph_tensors(Graph(gid, classes, edges, 0), d))
        labels.append(int(rng.integers(0, c)))
    return tensors, labels


def time_batch(mod, tensors, labels, weights, repeats):
    mod.batch_loss_grads(tensors, labels, *weights)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        mod.batch_loss_grads(tensors, labels, *weights)
    return (time.perf_counter() - t0) / repeats / len(labels)


def time_forward(mod, tensors, weights, repeats):
    s, sx = tensors[0]
    mod.forward_probs(s, sx, *weights)
    t0 = time.perf_counter()
    for _ in range(repeats):
        for s, sx in tensors:
            mod.forward_probs(s, sx, *weights)
    return (time.perf_counter() - t0) / repeats / len(tensors)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels unavailable; timing the python backend only")
    backends = [_pykernels] + ([_ckernels] if _ckernels else [])

    header = f"{'shape':<15} {'kernel':<22}" + "".join(f"{b.BACKEND:>12}" for b in backends)
    if _ckernels:
        header += f"{'speedup':>10}"
    print(header)
    for name, n, d, c in SHAPES:
        tensors, labels = make_batch(n, d, c)
        weights = init_params(d, 32, c, seed=1).weights

        if _ckernels:
            ref_loss, ref_grads = _pykernels.batch_loss_grads(tensors, labels, *weights)
            cmp_loss, cmp_grads = _ckernels.batch_loss_grads(tensors, labels, *weights)
            assert abs(ref_loss - cmp_loss) < 1e-9
            for a, b in zip(ref_grads, cmp_grads):
                np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)

        for label, timer in (("train fwd+bwd /graph", time_batch),
                             ("predict fwd /graph", time_forward)):
            times = []
            for mod in backends:
                if timer is time_batch:
                    times.append(timer(mod, tensors, labels, weights, args.repeats))
                else:
                    times.append(timer(mod, tensors, weights, args.repeats))
            row = f"{name:<15} {label:<22}" + "".join(f"{t * 1e6:>10.1f}us" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)
    if _ckernels:
        print("\nnumeric agreement between backends verified (rtol 1e-9).")


if __name__ == "__main__":
    main()
