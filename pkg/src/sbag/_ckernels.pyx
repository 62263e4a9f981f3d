# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-graph network kernels.

Same contract as sbag._pykernels: fused forward / forward+backward for one
graph given its normalized adjacency `s` and precomputed feature product
`sx`. Matrix products go straight to BLAS dgemm; activations, pooling, and
softmax are C loops. The win over the numpy path is removing per-array-op
Python dispatch from the training loop, which at these matrix sizes (tens of
rows) costs as much as the math itself.
"""

from libc.math cimport exp, log

import numpy as np

from scipy.linalg.cython_blas cimport dgemm

BACKEND = "compiled"


# Row-major products expressed through column-major dgemm by computing the
# transposed result: OUT^T = op(B)^T op(A)^T.

cdef void _mm(double* a, double* b, double* out,
              int ar, int inner, int bc, double beta) noexcept nogil:
    # out (ar x bc) = a (ar x inner) @ b (inner x bc) [+ beta * out]
    cdef double alpha = 1.0
    cdef char cn = b'N'
    dgemm(&cn, &cn, &bc, &ar, &inner, &alpha, b, &bc, a, &inner, &beta, out, &bc)


cdef void _mm_at_b(double* a, double* b, double* out,
                   int rows, int ac, int bc, double beta) noexcept nogil:
    # out (ac x bc) = a (rows x ac)^T @ b (rows x bc) [+ beta * out]
    cdef double alpha = 1.0
    cdef char cn = b'N', ct = b'T'
    dgemm(&cn, &ct, &bc, &ac, &rows, &alpha, b, &bc, a, &ac, &beta, out, &bc)


cdef void _mm_a_bt(double* a, double* b, double* out,
                   int ar, int inner, int br, double beta) noexcept nogil:
    # out (ar x br) = a (ar x inner) @ b (br x inner)^T [+ beta * out]
    cdef double alpha = 1.0
    cdef char cn = b'N', ct = b'T'
    dgemm(&ct, &cn, &br, &ar, &inner, &alpha, b, &inner, a, &inner, &beta, out, &br)


cdef void _relu(double* z, double* out, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = z[i] if z[i] > 0.0 else 0.0


cdef void _relu_mask(double* grad, double* z, double* out, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = grad[i] if z[i] > 0.0 else 0.0


cdef void _softmax_pooled(double* z2, Py_ssize_t n, Py_ssize_t c,
                          double* probs) noexcept nogil:
    # softmax over the column means of z2 (n x c, row-major)
    cdef Py_ssize_t i, j
    cdef double hi, total
    for j in range(c):
        probs[j] = 0.0
    for i in range(n):
        for j in range(c):
            probs[j] += z2[i * c + j]
    for j in range(c):
        probs[j] /= n
    hi = probs[0]
    for j in range(1, c):
        if probs[j] > hi:
            hi = probs[j]
    total = 0.0
    for j in range(c):
        probs[j] = exp(probs[j] - hi)
        total += probs[j]
    for j in range(c):
        probs[j] /= total


cdef double _graph_pass(double* s, double* sx,
                        double* w0, double* w1, double* w2,
                        int n, int d, int h, int c, int label,
                        double* scratch, double* probs,
                        double* g0, double* g1, double* g2,
                        double gbeta, bint backward) noexcept nogil:
    # scratch layout: z0, h1, z1, h2, work_h, u1 (n*h each), z2, u2 (n*c each)
    cdef double* z0 = scratch
    cdef double* h1 = z0 + n * h
    cdef double* z1 = h1 + n * h
    cdef double* h2 = z1 + n * h
    cdef double* work = h2 + n * h
    cdef double* u1 = work + n * h
    cdef double* z2 = u1 + n * h
    cdef double* u2 = z2 + n * c
    cdef Py_ssize_t i, j
    cdef double rowsum, loss

    _mm(sx, w0, z0, n, d, h, 0.0)
    _relu(z0, h1, n * h)
    _mm(h1, w1, work, n, h, h, 0.0)
    _mm(s, work, z1, n, n, h, 0.0)
    _relu(z1, h2, n * h)
    _mm(h2, w2, u2, n, h, c, 0.0)
    _mm(s, u2, z2, n, n, c, 0.0)
    _softmax_pooled(z2, n, c, probs)
    loss = -log(probs[label])
    if not backward:
        return loss

    # u2 = outer(rowsum(s)/n, probs - onehot(label))
    for i in range(n):
        rowsum = 0.0
        for j in range(n):
            rowsum += s[i * n + j]
        rowsum /= n
        for j in range(c):
            u2[i * c + j] = rowsum * (probs[j] - (1.0 if j == label else 0.0))
    _mm_at_b(h2, u2, g2, n, h, c, gbeta)

    _mm_a_bt(u2, w2, work, n, c, h, 0.0)   # dh2
    _relu_mask(work, z1, work, n * h)       # dz1
    _mm(s, work, u1, n, n, h, 0.0)
    _mm_at_b(h1, u1, g1, n, h, h, gbeta)

    _mm_a_bt(u1, w1, work, n, h, h, 0.0)   # dh1
    _relu_mask(work, z0, work, n * h)       # dz0
    _mm_at_b(sx, work, g0, n, d, h, gbeta)
    return loss


def forward_probs(double[:, ::1] s, double[:, ::1] sx,
                  double[:, ::1] w0, double[:, ::1] w1, double[:, ::1] w2):
    """Class-probability vector for one graph."""
    cdef int n = s.shape[0], d = w0.shape[0], h = w0.shape[1], c = w2.shape[1]
    scratch_arr = np.empty(6 * n * h + 2 * n * c)
    probs = np.empty(c)
    cdef double[::1] scratch = scratch_arr
    cdef double[::1] pv = probs
    with nogil:
        _graph_pass(&s[0, 0], &sx[0, 0], &w0[0, 0], &w1[0, 0], &w2[0, 0],
                    n, d, h, c, 0, &scratch[0], &pv[0],
                    NULL, NULL, NULL, 0.0, False)
    return probs


def forward_backward(double[:, ::1] s, double[:, ::1] sx,
                     double[:, ::1] w0, double[:, ::1] w1, double[:, ::1] w2,
                     int label):
    """Cross-entropy loss, probs, and exact gradients for one labeled graph."""
    cdef int n = s.shape[0], d = w0.shape[0], h = w0.shape[1], c = w2.shape[1]
    scratch_arr = np.empty(6 * n * h + 2 * n * c)
    probs = np.empty(c)
    gw0 = np.empty((d, h))
    gw1 = np.empty((h, h))
    gw2 = np.empty((h, c))
    cdef double[::1] scratch = scratch_arr
    cdef double[::1] pv = probs
    cdef double[:, ::1] g0 = gw0, g1 = gw1, g2 = gw2
    cdef double loss
    with nogil:
        loss = _graph_pass(&s[0, 0], &sx[0, 0], &w0[0, 0], &w1[0, 0], &w2[0, 0],
                           n, d, h, c, label, &scratch[0], &pv[0],
                           &g0[0, 0], &g1[0, 0], &g2[0, 0], 0.0, True)
    return loss, probs, gw0, gw1, gw2


def batch_loss_grads(tensors, labels, double[:, ::1] w0, double[:, ::1] w1,
                     double[:, ::1] w2):
    """Mean loss and mean gradients over a batch of (s, sx) graph tensors.

    One scratch allocation sized for the largest graph; gradients accumulate
    in place across the batch (dgemm beta=1).
    """
    cdef Py_ssize_t batch = len(labels)
    cdef int d = w0.shape[0], h = w0.shape[1], c = w2.shape[1]
    cdef int max_n = 0, n
    for s, _ in tensors:
        if s.shape[0] > max_n:
            max_n = s.shape[0]

    scratch_arr = np.empty(6 * max_n * h + 2 * max_n * c)
    probs = np.empty(c)
    g0 = np.zeros((d, h))
    g1 = np.zeros((h, h))
    g2 = np.zeros((h, c))
    cdef double[::1] scratch = scratch_arr
    cdef double[::1] pv = probs
    cdef double[:, ::1] a0 = g0, a1 = g1, a2 = g2
    cdef double[:, ::1] sv, sxv
    cdef double total = 0.0
    cdef int label
    cdef Py_ssize_t k

    for k in range(batch):
        sv = tensors[k][0]
        sxv = tensors[k][1]
        label = labels[k]
        n = sv.shape[0]
        with nogil:
            total += _graph_pass(&sv[0, 0], &sxv[0, 0], &w0[0, 0], &w1[0, 0],
                                 &w2[0, 0], n, d, h, c, label,
                                 &scratch[0], &pv[0],
                                 &a0[0, 0], &a1[0, 0], &a2[0, 0], 1.0, True)
    cdef double inv = 1.0 / batch
    return total * inv, (g0 * inv, g1 * inv, g2 * inv)
