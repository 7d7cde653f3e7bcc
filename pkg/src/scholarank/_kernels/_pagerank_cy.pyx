# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled core of the synchronous score-propagation kernel.

Same contract as ``_pagerank_py.power_iterate``; fused CSR loops avoid
the temporaries the NumPy path allocates per iteration.
"""

from libc.math cimport fabs, INFINITY

import numpy as np


def power_iterate(indptr, indices, teleport, double theta, double tolerance,
                  long long max_iterations):
    indptr_arr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices_arr = np.ascontiguousarray(indices, dtype=np.int64)
    teleport_arr = np.ascontiguousarray(teleport, dtype=np.float64)

    cdef const long long[::1] ip = indptr_arr
    cdef const long long[::1] idx = indices_arr
    cdef const double[::1] tp = teleport_arr

    cdef Py_ssize_t n = tp.shape[0]
    x_arr = np.full(n, 1.0 / n)
    cdef double[::1] x = x_arr
    new_arr = np.empty(n)
    cdef double[::1] new = new_arr
    contrib_arr = np.empty(n)
    cdef double[::1] contrib = contrib_arr

    cdef double one_minus_theta = 1.0 - theta
    cdef double residual = INFINITY
    cdef double total, inv_total, acc, value
    cdef long long iteration, degree
    cdef Py_ssize_t i, p

    for iteration in range(1, max_iterations + 1):
        for i in range(n):
            degree = ip[i + 1] - ip[i]
            contrib[i] = x[i] / degree if degree > 0 else 0.0
        total = 0.0
        for i in range(n):
            acc = 0.0
            for p in range(ip[i], ip[i + 1]):
                acc += contrib[idx[p]]
            value = one_minus_theta * tp[i] + theta * acc
            new[i] = value
            total += value
        if total <= 0.0:
            return x_arr, iteration, INFINITY, False
        inv_total = 1.0 / total
        residual = 0.0
        for i in range(n):
            value = new[i] * inv_total
            residual += fabs(value - x[i])
            x[i] = value
        if residual < tolerance:
            return x_arr, iteration, residual, True
    return x_arr, max_iterations, residual, False
