"""Degree-distribution data model and feasibility checking.

Edge-perspective degree distributions map a node degree i >= 2 to the fraction
of edges attached to nodes of that degree; the associated edge polynomial is
sum_i coeff_i * x**(i-1). An ``EnsembleSpec`` bundles a variable-side and a
check-side distribution with an erasure probability and is the unit of
verification: its decoding-success polynomial P(x) = x - lam(1 - rho(1 - eps*x))
must be nonnegative on [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Polynomial, de_polynomial

SUM_TOL = 1e-9
FEASIBILITY_TOL = 1e-9

GRID_POINTS = 10_001
CRITICAL_SCAN_POINTS = 4_096


class DegreeDistribution:
    """Sparse edge-perspective degree distribution.

    Coefficients must lie in [0, 1] and sum to 1 within ``SUM_TOL``; the
    minimum node degree is 2. Pass ``normalize=True`` to rescale inputs whose
    sum is off by printing round-off (tables quote four digits); rescaling by
    the exact float sum restores the invariant to machine precision.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries, *, normalize: bool = False):
        items = {}
        for degree, coeff in dict(entries).items():
            d = int(degree)
            if d != float(degree):
                raise ValueError(f"node degree {degree!r} is not an integer")
            c = float(coeff)
            if d < 2:
                raise ValueError(f"minimum node degree is 2, got {d}")
            if not np.isfinite(c) or c < 0.0 or c > 1.0:
                raise ValueError(f"coefficient for degree {d} must be in [0, 1], got {c}")
            if c != 0.0:
                items[d] = items.get(d, 0.0) + c
        if not items:
            raise ValueError("degree distribution has no nonzero coefficients")
        total = sum(items[d] for d in sorted(items))
        if normalize:
            if abs(total - 1.0) > 1e-2:
                raise ValueError(f"coefficients sum to {total}, too far from 1 to normalize")
            items = {d: c / total for d, c in items.items()}
            total = sum(items[d] for d in sorted(items))
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"coefficients must sum to 1 within {SUM_TOL}, got {total}")
        self._entries = dict(sorted(items.items()))

    def items(self):
        return self._entries.items()

    def degrees(self):
        return tuple(self._entries)

    def get(self, degree: int, default: float = 0.0) -> float:
        return self._entries.get(degree, default)

    def __getitem__(self, degree: int) -> float:
        return self._entries[degree]

    @property
    def max_degree(self) -> int:
        return max(self._entries)

    def edge_polynomial(self) -> Polynomial:
        """sum_i coeff_i * x**(i-1), dense ascending coefficients."""
        coeffs = np.zeros(self.max_degree)
        for degree, coeff in self._entries.items():
            coeffs[degree - 1] = coeff
        return Polynomial(coeffs)

    def inv_degree_moment(self) -> float:
        """sum_i coeff_i / i, proportional to the number of nodes per edge."""
        return sum(c / d for d, c in self._entries.items())

    def derivative_at_one(self) -> float:
        """Edge polynomial derivative at 1: sum_i coeff_i * (i - 1)."""
        return sum(c * (d - 1) for d, c in self._entries.items())

    def to_json_dict(self) -> dict:
        return {str(d): c for d, c in self._entries.items()}

    @classmethod
    def from_json_dict(cls, data, *, normalize: bool = False) -> "DegreeDistribution":
        try:
            entries = {int(k): float(v) for k, v in dict(data).items()}
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed degree distribution {data!r}: {exc}") from None
        return cls(entries, normalize=normalize)

    def __eq__(self, other):
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return self._entries == other._entries

    def __repr__(self):
        return f"DegreeDistribution({self._entries!r})"


@dataclass(frozen=True)
class EnsembleSpec:
    """One design point: variable and check distributions plus erasure rate."""

    lam: DegreeDistribution
    rho: DegreeDistribution
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")

    def to_json_dict(self) -> dict:
        return {
            "lambda": self.lam.to_json_dict(),
            "rho": self.rho.to_json_dict(),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json_dict(cls, data, *, normalize: bool = False) -> "EnsembleSpec":
        for key in ("lambda", "rho", "epsilon"):
            if key not in data:
                raise ValueError(f"ensemble spec is missing field '{key}'")
        return cls(
            lam=DegreeDistribution.from_json_dict(data["lambda"], normalize=normalize),
            rho=DegreeDistribution.from_json_dict(data["rho"], normalize=normalize),
            epsilon=float(data["epsilon"]),
        )


def design_rate(lam: DegreeDistribution, rho: DegreeDistribution) -> float:
    """1 - (sum_j rho_j / j) / (sum_i lam_i / i)."""
    return 1.0 - rho.inv_degree_moment() / lam.inv_degree_moment()


def capacity_gap(rate: float, eps: float) -> float:
    """Fractional distance from channel capacity: 1 - rate / (1 - eps)."""
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), got {eps}")
    if rate < 0.0:
        raise ValueError(f"rate must be nonnegative, got {rate}")
    return 1.0 - rate / (1.0 - eps)


def stability_lambda2_bound(rho: DegreeDistribution, eps: float) -> float:
    """Upper bound 1 / (eps * rho'(1)) on the degree-2 edge fraction.

    Derived from nonnegativity of P near 0: the linear coefficient of P is
    1 - eps * lam_2 * rho'(1) and must not be negative.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    slope = rho.derivative_at_one()
    return 1.0 / (eps * slope)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    worst_x: float
    worst_value: float
    mode: str


def check_de_feasible(spec: EnsembleSpec, mode: str = "grid",
                      tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    """Check P(x) >= -tol on [0, 1] for the decoding-success polynomial.

    mode="grid" samples P on a uniform 10001-point grid. mode="minimum"
    additionally isolates the interior critical points of P (bisection on the
    sign changes of P' over a 4096-point scan) and evaluates P there, so the
    reported minimum is not limited by grid resolution.
    """
    if mode not in ("grid", "minimum"):
        raise ValueError(f"mode must be 'grid' or 'minimum', got {mode!r}")
    p = de_polynomial(spec.lam, spec.rho, spec.epsilon)
    xs = np.linspace(0.0, 1.0, GRID_POINTS)
    values = p.evaluate_many(xs)
    worst = int(np.argmin(values))
    worst_x = float(xs[worst])
    worst_value = float(values[worst])

    if mode == "minimum":
        for x in _critical_points(p):
            v = p.evaluate(x)
            if v < worst_value:
                worst_value = v
                worst_x = x

    return FeasibilityReport(
        feasible=bool(worst_value >= -tol),
        worst_x=worst_x,
        worst_value=worst_value,
        mode=mode,
    )


def _critical_points(p: Polynomial):
    """Roots of P' in (0, 1) via bisection on sign changes of a dense scan."""
    dp = p.derivative()
    if dp.degree < 1:
        return []
    xs = np.linspace(0.0, 1.0, CRITICAL_SCAN_POINTS)
    dv = dp.evaluate_many(xs)
    roots = []
    for k in range(CRITICAL_SCAN_POINTS - 1):
        a, b = xs[k], xs[k + 1]
        fa, fb = dv[k], dv[k + 1]
        if fa == 0.0:
            if 0.0 < a < 1.0:
                roots.append(float(a))
            continue
        if fa * fb < 0.0:
            for _ in range(64):
                m = 0.5 * (a + b)
                fm = dp.evaluate(m)
                if fm == 0.0:
                    a = b = m
                    break
                if fa * fm < 0.0:
                    b = m
                else:
                    a, fa = m, fm
            roots.append(0.5 * (a + b))
    return [r for r in roots if 0.0 < r < 1.0]
