"""Pure-Python reference kernels.

These are the fallback implementations of the hot loops in `_speedups.pyx`.
Both versions perform the same IEEE-754 operations in the same order, so the
results are bit-for-bit identical; the compiled module is only faster.
"""

import numpy as np


def horner(coeffs, x):
    """Evaluate a polynomial (ascending coefficients) at a scalar."""
    acc = 0.0
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * x + coeffs[k]
    return acc


def de_trace(lam, rho, eps, max_iters, tol, stop_below):
    """Run the erasure fixed-point iteration, recording every iterate.

    Starting from x0 = eps, iterates x <- eps * lam(1 - rho(1 - x)) until the
    step magnitude drops below `tol`, the value drops below `stop_below`, or
    `max_iters` steps have been taken.

    Returns (trace, stopped_by_tol) where trace is a float64 array that
    includes the starting value.
    """
    x = eps
    trace = [x]
    stopped = False
    for _ in range(max_iters):
        inner = 1.0 - x
        r = horner(rho, inner)
        y = 1.0 - r
        xn = eps * horner(lam, y)
        trace.append(xn)
        delta = xn - x
        x = xn
        if abs(delta) < tol:
            stopped = True
            break
        if x < stop_below:
            break
    return np.asarray(trace, dtype=np.float64), stopped


def de_final(lam, rho, eps, max_iters, tol, stop_below):
    """Trace-free variant of `de_trace` for long runs.

    Returns (final, steps, stopped_by_tol, delta_last, delta_prev); the two
    trailing step sizes let callers extrapolate a geometric tail.
    """
    x = eps
    d_last = 0.0
    d_prev = 0.0
    steps = 0
    stopped = False
    for _ in range(max_iters):
        inner = 1.0 - x
        r = horner(rho, inner)
        y = 1.0 - r
        xn = eps * horner(lam, y)
        d_prev = d_last
        d_last = xn - x
        x = xn
        steps += 1
        if abs(d_last) < tol:
            stopped = True
            break
        if x < stop_below:
            break
    return x, steps, stopped, d_last, d_prev
