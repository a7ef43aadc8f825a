# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the erasure fixed-point iteration.

Operation-for-operation identical to `_pykernels`; see that module for the
contracts. Compiled without FP contraction so both paths round identically.
"""

import numpy as np

from libc.math cimport fabs


cdef inline double _horner(const double[::1] c, double x) noexcept nogil:
    cdef Py_ssize_t k = c.shape[0]
    cdef double acc = 0.0
    while k > 0:
        k -= 1
        acc = acc * x + c[k]
    return acc


def horner(const double[::1] coeffs, double x):
    """Evaluate a polynomial (ascending coefficients) at a scalar."""
    return _horner(coeffs, x)


def de_trace(const double[::1] lam, const double[::1] rho, double eps,
             Py_ssize_t max_iters, double tol, double stop_below):
    """Erasure fixed-point iteration with a full trace; see `_pykernels.de_trace`."""
    out = np.empty(max_iters + 1, dtype=np.float64)
    cdef double[::1] buf = out
    cdef double x = eps
    cdef double inner, r, y, xn, delta
    cdef Py_ssize_t i, n = 0
    cdef bint stopped = False
    buf[0] = x
    for i in range(max_iters):
        inner = 1.0 - x
        r = _horner(rho, inner)
        y = 1.0 - r
        xn = eps * _horner(lam, y)
        n += 1
        buf[n] = xn
        delta = xn - x
        x = xn
        if fabs(delta) < tol:
            stopped = True
            break
        if x < stop_below:
            break
    return out[:n + 1].copy(), stopped


def de_final(const double[::1] lam, const double[::1] rho, double eps,
             Py_ssize_t max_iters, double tol, double stop_below):
    """Trace-free fixed-point run; see `_pykernels.de_final`."""
    cdef double x = eps
    cdef double inner, r, y, xn
    cdef double d_last = 0.0, d_prev = 0.0
    cdef Py_ssize_t i, steps = 0
    cdef bint stopped = False
    with nogil:
        for i in range(max_iters):
            inner = 1.0 - x
            r = _horner(rho, inner)
            y = 1.0 - r
            xn = eps * _horner(lam, y)
            d_prev = d_last
            d_last = xn - x
            x = xn
            steps += 1
            if fabs(d_last) < tol:
                stopped = True
                break
            if x < stop_below:
                break
    return x, steps, stopped, d_last, d_prev
