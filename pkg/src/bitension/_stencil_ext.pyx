# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled central-difference kernels on a flattened lattice.

Neighbour tables ``plus[i, node]`` / ``minus[i, node]`` give the flat index
of the next/previous node along axis ``i`` (wrapping), so one loop nest
serves every lattice dimension.
"""

import numpy as np


def derivatives(const double[:, ::1] f, const Py_ssize_t[:, ::1] plus,
                const Py_ssize_t[:, ::1] minus, const double[::1] h, bint second):
    cdef Py_ssize_t N = f.shape[0]
    cdef Py_ssize_t C = f.shape[1]
    cdef Py_ssize_t m = h.shape[0]
    cdef Py_ssize_t node, i, j, c, p, q
    cdef double val
    d1 = np.empty((N, C, m))
    cdef double[:, :, ::1] D1 = d1
    with nogil:
        for node in range(N):
            for i in range(m):
                p = plus[i, node]
                q = minus[i, node]
                for c in range(C):
                    D1[node, c, i] = (f[p, c] - f[q, c]) / (2.0 * h[i])
    if not second:
        return d1, None
    d2 = np.empty((N, C, m, m))
    cdef double[:, :, :, ::1] D2 = d2
    with nogil:
        for node in range(N):
            for i in range(m):
                p = plus[i, node]
                q = minus[i, node]
                for c in range(C):
                    D2[node, c, i, i] = (f[p, c] - 2.0 * f[node, c] + f[q, c]) / (h[i] * h[i])
                for j in range(i + 1, m):
                    p = plus[j, node]
                    q = minus[j, node]
                    for c in range(C):
                        val = (D1[p, c, i] - D1[q, c, i]) / (2.0 * h[j])
                        D2[node, c, i, j] = val
                        D2[node, c, j, i] = val
    return d1, d2
