"""Kernel selection: compiled extension if available, pure Python otherwise.

The two implementations are exact twins (identical IEEE-754 operation order),
so everything downstream is deterministic regardless of which one is active.
Set LDPCOPT_PURE_PYTHON=1 to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("LDPCOPT_PURE_PYTHON"):
    _impl = _pykernels
    HAVE_COMPILED = False
else:
    try:
        from . import _speedups as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = _pykernels
        HAVE_COMPILED = False

ACTIVE_IMPL = "compiled" if HAVE_COMPILED else "python"


def _as_coeffs(c):
    return np.ascontiguousarray(c, dtype=np.float64)


def horner(coeffs, x):
    """Horner evaluation of ascending coefficients at a scalar point."""
    return _impl.horner(_as_coeffs(coeffs), float(x))


def de_trace(lam_coeffs, rho_coeffs, eps, max_iters, tol, stop_below=0.0):
    """Erasure fixed-point iteration from x0=eps, returning the full trace."""
    return _impl.de_trace(
        _as_coeffs(lam_coeffs), _as_coeffs(rho_coeffs), float(eps),
        int(max_iters), float(tol), float(stop_below),
    )


def de_final(lam_coeffs, rho_coeffs, eps, max_iters, tol, stop_below=0.0):
    """Trace-free fixed-point run; returns (final, steps, stopped, d_last, d_prev)."""
    return _impl.de_final(
        _as_coeffs(lam_coeffs), _as_coeffs(rho_coeffs), float(eps),
        int(max_iters), float(tol), float(stop_below),
    )


def implementations():
    """Expose both kernel implementations (for tests and benchmarks)."""
    impls = {"python": _pykernels}
    try:
        from . import _speedups

        impls["compiled"] = _speedups
    except ImportError:
        pass
    return impls
