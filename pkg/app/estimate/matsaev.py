"""Polynomial comparisons between Fourier multipliers and the truncated shift."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from app.errors import LabInputError, NotSelfadjoint
from app.estimate.pnorm import NormEstimate, pq_norm_lower
from app.groups.algebra import GroupAlgebra, fourier_multiplier, multiplier_polynomial
from app.linalg.core import INF, check_exponent
from app.superop.superoperator import SuperOperator, commutative_map, identity_map

logger = logging.getLogger(__name__)

MAX_DEGREE = 32
CIRCLE_GRID = 2 ** 14


@dataclass(frozen=True, eq=False)
class Polynomial:
    """P(z) = Σ_k a_k z^k with coefficients listed from a_0 upwards."""
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise LabInputError("polynomial needs a non-empty coefficient vector")
        if not np.all(np.isfinite(coeffs)):
            raise LabInputError("polynomial coefficients must be finite")
        if coeffs.size - 1 > MAX_DEGREE:
            raise LabInputError(f"polynomial degree {coeffs.size - 1} exceeds {MAX_DEGREE}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        nonzero = np.nonzero(self.coefficients)[0]
        return int(nonzero[-1]) if nonzero.size else 0

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coefficients)

    def of_matrix(self, x: np.ndarray) -> np.ndarray:
        """Horner evaluation P(X) for a square matrix."""
        x = np.asarray(x, dtype=complex)
        out = self.coefficients[-1] * np.eye(x.shape[0], dtype=complex)
        for a in self.coefficients[-2::-1]:
            out = out @ x + a * np.eye(x.shape[0])
        return out

    def __str__(self) -> str:
        terms = [f"({a:g})z^{k}" for k, a in enumerate(self.coefficients) if a != 0]
        return " + ".join(terms) or "0"


def circle_sup(poly: Polynomial, grid: int = CIRCLE_GRID, refine: int = 8) -> float:
    """sup_{|z|=1} |P(z)| from a uniform grid refined around its best points."""
    theta = 2.0 * np.pi * np.arange(grid) / grid
    values = np.abs(poly(np.exp(1j * theta)))
    best = float(np.max(values))
    step = 2.0 * np.pi / grid
    for idx in np.argsort(-values, kind="stable")[:refine]:
        res = minimize_scalar(
            lambda t: -abs(poly(np.exp(1j * t))),
            bounds=(theta[idx] - step, theta[idx] + step),
            method="bounded",
            options={"xatol": 1e-14},
        )
        best = max(best, float(-res.fun))
    return best


def shift_operator(n: int) -> np.ndarray:
    """Nilpotent shift e_k ↦ e_{k+1} on ℓ^p_n."""
    if n < 1:
        raise LabInputError(f"shift dimension must be positive, got {n}")
    return np.eye(n, k=-1, dtype=complex)


def polynomial_of_map(poly: Polynomial, t: SuperOperator) -> SuperOperator:
    """P(T) by Horner's rule on superoperators (constant term times the identity map)."""
    if not t.is_square:
        raise LabInputError("polynomials need a map M_n -> M_n")
    ident = identity_map(t.in_dim)
    out = ident * complex(poly.coefficients[-1])
    for a in poly.coefficients[-2::-1]:
        out = (out @ t) + ident * complex(a)
    return out


@dataclass(eq=False)
class MatsaevReport:
    """Both sides of ‖P(M_φ) ⊗ Id_{S^p_d}‖ ≤ ‖P(S)‖ at one exponent."""
    polynomial: Polynomial
    p: float
    lhs: Dict[int, NormEstimate]
    rhs_circle: float
    rhs_shift: NormEstimate
    tol: float
    violated: bool = False
    margins: Dict[str, float] = field(default_factory=dict)

    @property
    def lhs_max(self) -> float:
        return max(est.value for est in self.lhs.values())


def matsaev_check(
    alg: GroupAlgebra,
    phi,
    poly: Polynomial,
    p: float = 2.0,
    n_shift: Optional[int] = None,
    degrees: Sequence[int] = (1, 2),
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
    tol: float = 1e-8,
) -> MatsaevReport:
    """Compare P(M_φ) for a real contractively decomposable symbol with P of the shift.

    The left side is estimated at amplification degrees ``degrees``; the right side is
    sup_{|z|=1}|P(z)| (exact at p = 2) and a lower bound from the n_shift-dimensional
    truncated shift on ℓ^p. Only the p = 2 comparison can flag a violation.
    """
    p = check_exponent(p)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if np.max(np.abs(phi.imag)) > 1e-12:
        raise NotSelfadjoint("Matsaev comparison expects a real symbol")
    n_shift = n_shift or max(8, poly.degree + 1)

    composed = fourier_multiplier(alg, multiplier_polynomial(phi.real, poly.coefficients))
    lhs = {d: pq_norm_lower(composed, p, d=d, restarts=restarts, seed=seed, algebra=alg) for d in degrees}
    rhs_circle = circle_sup(poly)
    shifted = commutative_map(poly.of_matrix(shift_operator(n_shift)))
    rhs_shift = pq_norm_lower(shifted, p, d=1, restarts=restarts, seed=seed)

    report = MatsaevReport(poly, p, lhs, rhs_circle, rhs_shift, tol)
    report.margins = {"circle": rhs_circle - report.lhs_max, "shift": rhs_shift.value - report.lhs_max}
    report.violated = bool(p == 2.0 and report.lhs_max > rhs_circle + tol)
    level = logging.ERROR if report.violated else logging.INFO
    p_label = "inf" if p == INF else f"{p:g}"
    logger.log(
        level,
        f"Matsaev {alg.name} p={p_label} P={poly}: lhs={report.lhs_max:.10g} "
        f"circle={rhs_circle:.10g} shift={rhs_shift.value:.10g}",
    )
    return report
