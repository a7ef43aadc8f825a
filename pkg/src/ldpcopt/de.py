"""Independent verification layer: fixed-point simulation of the erasure
decoder, threshold bisection, and the discretized-LP baseline.

Everything here deliberately avoids the sum-of-squares machinery so that the
two routes check each other: the fixed-point iteration works directly on the
degree polynomials, and the LP baseline enforces the decoding constraint only
on finitely many grid points (a relaxation whose objective upper-bounds the
exact program and converges to it as the grid is refined).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .ensemble import DegreeDistribution, EnsembleSpec, design_rate
from .poly import Polynomial
from .solver import ConicProblem, solve_lp_discretized

DEFAULT_MAX_ITERS = 10_000
DEFAULT_STEP_TOL = 1e-12
ZERO_CUTOFF = 1e-9

# Budget ladder for the threshold predicate: near-threshold ensembles decay
# slowly (the contraction factor approaches 1), so the default budget cannot
# always separate "slowly to zero" from "positive fixed point". Runs are
# extended once and, at the cap, classified by scanning the step map for a
# fixed point below the last iterate.
_PREDICATE_BUDGETS = (10_000, 300_000)
_FIXED_POINT_SCAN = 4096


@dataclass(frozen=True)
class DeTrace:
    """Erasure-fraction trajectory of the message-passing fixed point."""

    values: np.ndarray
    converged: bool
    final: float
    iterations: int

    @property
    def converged_to_zero(self) -> bool:
        return self.final < ZERO_CUTOFF


def de_iterate(spec: EnsembleSpec, max_iters: int = DEFAULT_MAX_ITERS,
               tol: float = DEFAULT_STEP_TOL) -> DeTrace:
    """Iterate x <- eps * lam(1 - rho(1 - x)) from x0 = eps.

    Stops when the step magnitude drops below `tol` or after `max_iters`
    steps; the trajectory is monotone non-increasing for valid ensembles.
    """
    lam_c = spec.lam.edge_polynomial().coeffs
    rho_c = spec.rho.edge_polynomial().coeffs
    values, stopped = kernels.de_trace(lam_c, rho_c, spec.epsilon, max_iters, tol)
    return DeTrace(
        values=values,
        converged=bool(stopped),
        final=float(values[-1]),
        iterations=values.size - 1,
    )


def _horner_many(coeffs, xs):
    acc = np.zeros_like(xs)
    for k in range(len(coeffs) - 1, -1, -1):
        acc = acc * xs + coeffs[k]
    return acc


def _converges_to_zero(lam_c, rho_c, eps: float) -> bool:
    """Threshold predicate: does the erasure fixed point reach zero?

    Runs the trace-free iteration with an escalating budget. If the budget is
    exhausted while still descending, the monotone step map settles at the
    largest fixed point below the last iterate, so the tail is classified by
    scanning eps * lam(1 - rho(1 - x)) - x for a sign crossing on a dense
    logarithmic grid between the zero cutoff and the last iterate.
    """
    if eps <= 0.0:
        return True
    final = eps
    for budget in _PREDICATE_BUDGETS:
        final, _, _, d_last, _ = kernels.de_final(
            lam_c, rho_c, eps, budget, 0.0, ZERO_CUTOFF * 0.1)
        if final < ZERO_CUTOFF:
            return True
        if d_last == 0.0:
            return False
    xs = np.exp(np.linspace(np.log(ZERO_CUTOFF), np.log(final), _FIXED_POINT_SCAN))
    gap = eps * _horner_many(lam_c, 1.0 - _horner_many(rho_c, 1.0 - xs)) - xs
    return bool(np.all(gap < 0.0))


def bisect_threshold(lam: DegreeDistribution, rho: DegreeDistribution,
                     precision: float = 1e-6) -> float:
    """Largest erasure probability whose fixed point still reaches zero.

    Bisection on [0, 1] with the `de_iterate` converged-to-zero predicate.
    The result also satisfies the capacity-side bound
    eps* <= (sum rho_j / j) / (sum lam_i / i) up to `precision`.
    """
    lam_c = lam.edge_polynomial().coeffs
    rho_c = rho.edge_polynomial().coeffs
    lo, hi = 0.0, 1.0
    if _converges_to_zero(lam_c, rho_c, hi):
        return hi
    while hi - lo > precision:
        mid = 0.5 * (lo + hi)
        if _converges_to_zero(lam_c, rho_c, mid):
            lo = mid
        else:
            hi = mid
    threshold = 0.5 * (lo + hi)
    cap = rho.inv_degree_moment() / lam.inv_degree_moment()
    if threshold > cap + precision:
        raise RuntimeError(
            f"threshold {threshold} exceeds the capacity bound {cap}")
    return threshold


# ---------------------------------------------------------------------------
# Discretized-LP baseline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LpSweepRow:
    n_points: int
    status: str
    objective: Optional[float]
    rate: Optional[float]
    lam: Optional[dict]


def build_discretized_lp(rho: DegreeDistribution, eps: float, max_var_degree: int,
                         n_points: int) -> ConicProblem:
    """LP enforcing the decoding constraint at x_k = k/N, k = 1..N only.

    maximize sum_i lam_i / i  over the simplex with lam_i in [0, 1] and
    sum_i lam_i * psi(x_k)**(i-1) <= x_k,  psi(x) = 1 - rho(1 - eps*x).
    """
    if n_points < 1:
        raise ValueError("need at least one grid point")
    if max_var_degree < 2:
        raise ValueError("max_var_degree must be at least 2")
    psi = Polynomial((1.0,)).sub(
        rho.edge_polynomial().compose(Polynomial((1.0, -eps))))
    nl = max_var_degree - 1
    xs = np.arange(1, n_points + 1) / n_points

    A = np.zeros((1 + n_points, nl + n_points))
    b = np.zeros(1 + n_points)
    A[0, :nl] = 1.0
    b[0] = 1.0
    block = Polynomial.one()
    for j in range(nl):
        block = block.mul(psi)
        A[1:, j] = block.evaluate_many(xs)
    A[1:, nl:] = np.eye(n_points)
    b[1:] = xs

    c = np.zeros(nl + n_points)
    c[:nl] = [1.0 / i for i in range(2, max_var_degree + 1)]
    return ConicProblem(
        sense="max", c=c, A=A, b=b,
        n_nonneg=n_points,
        box_lo=np.zeros(nl), box_hi=np.ones(nl),
        var_names=tuple(f"lambda_{i}" for i in range(2, max_var_degree + 1)),
    )


def lp_baseline_sweep(rho: DegreeDistribution, eps: float, max_var_degree: int,
                      grid_sizes: Iterable[int], tol: float = 1e-8) -> list:
    """Solve the discretized LP for each grid size, in ascending order.

    Solver failures are recorded per row and do not abort the sweep.
    """
    rows = []
    for n in sorted(set(int(n) for n in grid_sizes)):
        prob = build_discretized_lp(rho, eps, max_var_degree, n)
        try:
            sol = solve_lp_discretized(prob, tol=tol)
        except Exception as exc:  # pragma: no cover - defensive
            rows.append(LpSweepRow(n, f"error: {exc}", None, None, None))
            continue
        if sol.status != "optimal":
            rows.append(LpSweepRow(n, sol.status, None, None, None))
            continue
        lam_vals = sol.x[: max_var_degree - 1]
        taps = {i: float(v) for i, v in zip(range(2, max_var_degree + 1), lam_vals)}
        lam = DegreeDistribution(
            {i: v for i, v in taps.items() if v > 1e-12}, normalize=True)
        rows.append(LpSweepRow(
            n_points=n,
            status="optimal",
            objective=float(sol.objective),
            rate=float(design_rate(lam, rho)),
            lam=taps,
        ))
    return rows


def sweep_rows_to_csv(rows: Sequence[LpSweepRow], max_var_degree: int,
                      stream: IO[str]) -> None:
    """Write sweep rows as CSV: N,rate,objective,lambda_2..lambda_Dv,status."""
    degrees = list(range(2, max_var_degree + 1))
    header = ["N", "rate", "objective"] + [f"lambda_{i}" for i in degrees] + ["status"]
    stream.write(",".join(header) + "\n")
    for row in rows:
        cells = [str(row.n_points)]
        if row.status == "optimal":
            cells.append(f"{row.rate:.6g}")
            cells.append(f"{row.objective:.6g}")
            cells.extend(f"{row.lam.get(i, 0.0):.6g}" for i in degrees)
        else:
            cells.extend([""] * (2 + len(degrees)))
        cells.append(row.status)
        stream.write(",".join(cells) + "\n")
