"""Norm programs: decomposable, completely bounded and Schur-multiplier norms at the ∞ level.

All programs minimise a shared bound t on spectral norms encoded as t·I − X ⪰ 0.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.errors import Infeasible, LabInputError, NotDiagonalInput, NotSelfadjoint, NotSquare, SolverError
from app.groups.algebra import GroupAlgebra, block_fourier_multiplier, fourier_multiplier, is_selfadjoint_symbol
from app.linalg.core import as_matrix, partial_trace
from app.sdp.problem import AffineExpr, SdpOptions, SdpProblem, SdpSolution, SdpStatus, solve
from app.superop.positivity import is_selfadjoint_map
from app.superop.superoperator import (
    SuperOperator,
    adjoint,
    block_choi,
    has_diagonal_input,
    unitary_row_map,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecNormResult:
    """‖T‖_dec with maps v1, v2 making [[v1, T], [T°, v2]] completely positive."""
    value: float
    v1: SuperOperator
    v2: SuperOperator
    solution: SdpSolution

    @property
    def certified(self) -> bool:
        return self.solution.optimal


@dataclass(frozen=True, eq=False)
class CbNormResult:
    value: float
    solution: SdpSolution

    @property
    def certified(self) -> bool:
        return self.solution.optimal


@dataclass(frozen=True, eq=False)
class SchurNormResult:
    """‖M_A‖ with the factorisation certificate [[P, A], [A*, Q]] ⪰ 0."""
    value: float
    p: np.ndarray
    q: np.ndarray
    solution: SdpSolution

    @property
    def certified(self) -> bool:
        return self.solution.optimal


@dataclass(frozen=True, eq=False)
class PropertyPWitness:
    """Unital symbols ψ1, ψ2 with [[M_ψ1, M_φ], [M_φ, M_ψ2]] completely positive.

    ``margin`` is the smallest eigenvalue of the block Choi matrix attained by the solver.
    """
    psi1: np.ndarray
    psi2: np.ndarray
    margin: float
    solution: SdpSolution


def _checked(sol: SdpSolution) -> SdpSolution:
    if sol.status == SdpStatus.INFEASIBLE:
        raise Infeasible(f"{sol.name}: program is infeasible", certificate=sol.certificate)
    if sol.status == SdpStatus.UNBOUNDED:
        raise SolverError(f"{sol.name}: program is unbounded")
    return sol


def _is_real(*arrays) -> bool:
    return all(not np.any(np.asarray(a).imag) for a in arrays)


def _scalar_identity(size: int):
    return lambda s: s[0, 0] * np.eye(size)


def _minimize_t(prob: SdpProblem) -> None:
    prob.variable("t", 1, real=True)
    prob.minimize(AffineExpr.scalar().add("t", lambda s: s))


def _dec_norm(t: SuperOperator, side: str, label: str, options: Optional[SdpOptions]) -> DecNormResult:
    n, m = t.in_dim, t.out_dim
    size = n * m
    real = _is_real(t.choi)
    prob = SdpProblem(f"{label}[M{n}->M{m}]")
    prob.variable("v1", size, real=real)
    prob.variable("v2", size, real=real)
    _minimize_t(prob)

    const = block_choi([[None, t.choi], [t.choi.conj().T, None]], n, m)
    prob.add_psd(
        AffineExpr(4 * size, const)
        .add("v1", lambda x: block_choi([[x, None], [None, None]], n, m))
        .add("v2", lambda x: block_choi([[None, None], [None, x]], n, m))
    )
    dim = m if side == "first" else n
    for name in ("v1", "v2"):
        prob.add_psd(
            AffineExpr(dim)
            .add("t", _scalar_identity(dim))
            .add(name, lambda x: -partial_trace(x, (n, m), side))
        )
    sol = _checked(solve(prob, options))
    return DecNormResult(
        value=sol.primal_objective,
        v1=SuperOperator(n, m, sol.values["v1"]),
        v2=SuperOperator(n, m, sol.values["v2"]),
        solution=sol,
    )


def dec_norm_inf(t: SuperOperator, options: Optional[SdpOptions] = None) -> DecNormResult:
    """Decomposable norm of T: M_n → M_m.

    Minimises t subject to Choi([[v1, T], [T°, v2]]) ⪰ 0 and t·I − v_i(I) ⪰ 0; for
    completely positive v_i the norm ‖v_i‖ equals ‖v_i(I)‖.
    """
    return _dec_norm(t, "first", "dec_norm_inf", options)


def dec_norm_one(t: SuperOperator, options: Optional[SdpOptions] = None) -> DecNormResult:
    """Decomposable norm of T: S^1_n → S^1_m.

    Same block condition as ``dec_norm_inf``; a completely positive v on S^1 has norm
    ‖v*(I)‖, the partial trace of its Choi matrix over the output factor. Equals
    ``dec_norm_inf(adjoint(T))``.
    """
    return _dec_norm(t, "second", "dec_norm_one", options)


def dec_norm_selfadjoint(t: SuperOperator, options: Optional[SdpOptions] = None) -> DecNormResult:
    """Decomposable norm of a selfadjoint T as min ‖S(I)‖ over S with S ± T completely positive.

    Raises:
        NotSelfadjoint: If T(x*) ≠ T(x)*
    """
    if not is_selfadjoint_map(t, tol=1e-9 * (1.0 + float(np.max(np.abs(t.choi))))):
        raise NotSelfadjoint("dec_norm_selfadjoint needs a selfadjoint map")
    n, m = t.in_dim, t.out_dim
    size = n * m
    choi = 0.5 * (t.choi + t.choi.conj().T)
    prob = SdpProblem(f"dec_norm_selfadjoint[M{n}->M{m}]")
    prob.variable("s", size, real=_is_real(choi))
    _minimize_t(prob)
    prob.add_psd(AffineExpr(size, choi).add("s", lambda x: x))
    prob.add_psd(AffineExpr(size, -choi).add("s", lambda x: x))
    prob.add_psd(AffineExpr(m).add("t", _scalar_identity(m)).add("s", lambda x: -partial_trace(x, (n, m), "first")))
    sol = _checked(solve(prob, options))
    s = SuperOperator(n, m, sol.values["s"])
    return DecNormResult(value=sol.primal_objective, v1=s, v2=s, solution=sol)


def dec_norm_from_commutative(t: SuperOperator, options: Optional[SdpOptions] = None) -> DecNormResult:
    """Decomposable norm of T: ℓ^∞_n → M_m, e_k ↦ u_k.

    Complete positivity from a commutative algebra is positivity on the atoms, so the
    block condition splits into [[V1_k, u_k], [u_k*, V2_k]] ⪰ 0 for each k with
    t·I − Σ_k V_i,k ⪰ 0.

    Raises:
        NotDiagonalInput: If T does not vanish on off-diagonal matrix units
    """
    scale = 1.0 + float(np.max(np.abs(t.choi)))
    if not has_diagonal_input(t, tol=1e-12 * scale):
        raise NotDiagonalInput("map must vanish on off-diagonal input units to be defined on l^inf_n")
    n, m = t.in_dim, t.out_dim
    images = [t.image(k, k) for k in range(n)]
    real = _is_real(*images)
    prob = SdpProblem(f"dec_norm_from_commutative[l{n}->M{m}]")
    for k in range(n):
        prob.variable(f"v1_{k}", m, real=real)
        prob.variable(f"v2_{k}", m, real=real)
    _minimize_t(prob)

    zero = np.zeros((m, m))
    for k, u in enumerate(images):
        const = np.block([[zero, u], [u.conj().T, zero]])
        prob.add_psd(
            AffineExpr(2 * m, const)
            .add(f"v1_{k}", lambda x: np.block([[x, zero], [zero, zero]]))
            .add(f"v2_{k}", lambda x: np.block([[zero, zero], [zero, x]]))
        )
    for side in ("v1", "v2"):
        expr = AffineExpr(m).add("t", _scalar_identity(m))
        for k in range(n):
            expr.add(f"{side}_{k}", lambda x: -x)
        prob.add_psd(expr)
    sol = _checked(solve(prob, options))
    return DecNormResult(
        value=sol.primal_objective,
        v1=unitary_row_map([sol.values[f"v1_{k}"] for k in range(n)]),
        v2=unitary_row_map([sol.values[f"v2_{k}"] for k in range(n)]),
        solution=sol,
    )


def cb_norm_inf(t: SuperOperator, options: Optional[SdpOptions] = None) -> CbNormResult:
    """Completely bounded norm of T: M_n → M_m.

    Computed as the diamond norm of the trace-dual map T*: M_m → M_n with Choi
    matrix J: minimise t subject to [[Y0, J], [J*, Y1]] ⪰ 0 and
    t·I − Tr_out(Y_i) ⪰ 0.
    """
    dual = adjoint(t)
    a, b = dual.in_dim, dual.out_dim
    size = a * b
    j = dual.choi
    real = _is_real(j)
    prob = SdpProblem(f"cb_norm_inf[M{t.in_dim}->M{t.out_dim}]")
    prob.variable("y0", size, real=real)
    prob.variable("y1", size, real=real)
    _minimize_t(prob)

    zero = np.zeros((size, size))
    prob.add_psd(
        AffineExpr(2 * size, np.block([[zero, j], [j.conj().T, zero]]))
        .add("y0", lambda x: np.block([[x, zero], [zero, zero]]))
        .add("y1", lambda x: np.block([[zero, zero], [zero, x]]))
    )
    for name in ("y0", "y1"):
        prob.add_psd(
            AffineExpr(a)
            .add("t", _scalar_identity(a))
            .add(name, lambda x: -partial_trace(x, (a, b), "second"))
        )
    sol = _checked(solve(prob, options))
    return CbNormResult(value=sol.primal_objective, solution=sol)


def schur_cb_norm(a, options: Optional[SdpOptions] = None) -> SchurNormResult:
    """Norm of the Schur multiplier M_A on B(ℓ²_n) (equal to its cb norm).

    ‖M_A‖ = min max(max_i P_ii, max_j Q_jj) over [[P, A], [A*, Q]] ⪰ 0.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"Schur symbol must be square, got shape {a.shape}")
    n = a.shape[0]
    real = _is_real(a)
    prob = SdpProblem(f"schur_cb_norm[n={n}]")
    prob.variable("p", n, real=real)
    prob.variable("q", n, real=real)
    _minimize_t(prob)

    zero = np.zeros((n, n))
    prob.add_psd(
        AffineExpr(2 * n, np.block([[zero, a], [a.conj().T, zero]]))
        .add("p", lambda x: np.block([[x, zero], [zero, zero]]))
        .add("q", lambda x: np.block([[zero, zero], [zero, x]]))
    )
    for name in ("p", "q"):
        prob.add_nonneg(AffineExpr(n).add("t", _scalar_identity(n)).add(name, lambda x: -np.diag(np.diag(x))))
    sol = _checked(solve(prob, options))
    return SchurNormResult(value=sol.primal_objective, p=sol.values["p"], q=sol.values["q"], solution=sol)


def property_P_witness(
    alg: GroupAlgebra,
    phi,
    tol: float = 1e-7,
    options: Optional[SdpOptions] = None,
) -> Optional[PropertyPWitness]:
    """Search for unital real symbols ψ1, ψ2 making the block multiplier completely positive.

    Maximises s subject to ψ_i(e) = 1 and Choi([[M̃ψ1, M̃φ], [M̃φ, M̃ψ2]]) − s·I ⪰ 0.

    Returns:
        The witness when the optimum is ≥ −tol, ``None`` (with a warning) when the
        solver cannot decide either way

    Raises:
        Infeasible: If the dual bound certifies that no witness exists
        NotSelfadjoint: If φ is not a real symbol with φ(s⁻¹) = φ(s)
    """
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.shape != (alg.order,):
        raise LabInputError(f"symbol on {alg.name} needs {alg.order} values, got {phi.size}")
    if np.max(np.abs(phi.imag)) > 1e-12 or not is_selfadjoint_symbol(alg, phi, tol=1e-12):
        raise NotSelfadjoint("property (P) witnesses are sought for real selfadjoint symbols")
    phi = phi.real
    n = alg.order
    e = alg.group.identity
    base = block_fourier_multiplier(alg, [[None, phi], [phi, None]]).choi
    dim = base.shape[0]

    prob = SdpProblem(f"property_P[{alg.name}]")
    prob.variable("psi1", n, real=True, diagonal=True)
    prob.variable("psi2", n, real=True, diagonal=True)
    prob.variable("s", 1, real=True)
    prob.maximize(AffineExpr.scalar().add("s", lambda s: s))
    for name in ("psi1", "psi2"):
        prob.add_equality(AffineExpr.scalar().add(name, lambda x: x[e, e]), 1.0)

    def block_term(corner: int):
        def fn(x):
            chois = [[None, None], [None, None]]
            chois[corner][corner] = fourier_multiplier(alg, np.diag(x)).choi
            return block_choi(chois, n, n)
        return fn

    prob.add_psd(
        AffineExpr(dim, base)
        .add("psi1", block_term(0))
        .add("psi2", block_term(1))
        .add("s", lambda s: -s[0, 0] * np.eye(dim))
    )
    sol = solve(prob, options)
    if sol.status == SdpStatus.INFEASIBLE:
        raise Infeasible(f"{sol.name}: no unital selfadjoint block extension", certificate=sol.certificate)
    if sol.status == SdpStatus.UNBOUNDED:
        raise SolverError(f"{sol.name}: program is unbounded")

    margin = sol.primal_objective
    upper = sol.dual_objective
    if np.isfinite(upper) and upper < -tol:
        raise Infeasible(
            f"{sol.name}: block extension impossible (dual bound {upper:.3e} < {-tol:.1e})"
        )
    if margin >= -tol:
        return PropertyPWitness(
            psi1=np.real(np.diag(sol.values["psi1"])).copy(),
            psi2=np.real(np.diag(sol.values["psi2"])).copy(),
            margin=margin,
            solution=sol,
        )
    logger.warning(f"{sol.name}: inconclusive (primal {margin:.3e}, dual {upper:.3e})")
    return None
