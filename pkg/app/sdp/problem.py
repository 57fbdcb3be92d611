"""Semidefinite programs over Hermitian matrix blocks, solved with cvxopt's conic interior-point method.

A problem is written in terms of named Hermitian variable blocks. Every constraint
is an affine expression: a constant matrix plus linear functions of blocks. The
blocks are parametrised by real coordinates, each affine expression is tabulated
on the coordinate basis, and complex PSD constraints are embedded as the real
symmetric matrices [[Re, -Im], [Im, Re]] (real data stays real).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from cvxopt import matrix, solvers, spmatrix
from scipy import sparse

from app.config import config
from app.errors import LabInputError, SolverError
from app.models.schemas import SdpSolutionRecord

logger = logging.getLogger(__name__)

LinearFn = Callable[[np.ndarray], np.ndarray]


class SdpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class SdpOptions:
    """Stopping rules handed to the interior-point engine."""
    abstol: float = config.SDP_ABSTOL
    reltol: float = config.SDP_RELTOL
    feastol: float = config.SDP_FEASTOL
    maxiters: int = config.SDP_MAXITER

    @classmethod
    def from_flags(cls, sdp_tol: Optional[float] = None, sdp_maxiter: Optional[int] = None) -> "SdpOptions":
        """CLI overrides: ``--sdp-tol`` sets the absolute and feasibility tolerances."""
        base = cls()
        tol_fields = {}
        if sdp_tol is not None:
            tol_fields = {"abstol": sdp_tol, "feastol": sdp_tol, "reltol": 10.0 * sdp_tol}
        return cls(
            abstol=tol_fields.get("abstol", base.abstol),
            reltol=tol_fields.get("reltol", base.reltol),
            feastol=tol_fields.get("feastol", base.feastol),
            maxiters=sdp_maxiter or base.maxiters,
        )

    def as_cvxopt(self) -> Dict:
        return {
            "show_progress": False,
            "abstol": self.abstol,
            "reltol": self.reltol,
            "feastol": self.feastol,
            "maxiters": self.maxiters,
        }


@dataclass(frozen=True)
class HermitianBlock:
    """A Hermitian (or real symmetric, or real diagonal) matrix variable."""
    name: str
    dim: int
    real: bool = False
    diagonal: bool = False

    @property
    def n_params(self) -> int:
        if self.diagonal:
            return self.dim
        pairs = self.dim * (self.dim - 1) // 2
        return self.dim + pairs * (1 if self.real else 2)

    @cached_property
    def _pairs(self) -> List[Tuple[int, int]]:
        return [(k, l) for k in range(self.dim) for l in range(k + 1, self.dim)]

    def basis_entries(self, k: int) -> List[Tuple[int, int, complex]]:
        """Non-zero entries of the k-th coordinate matrix."""
        d = self.dim
        if k < d:
            return [(k, k, 1.0)]
        pairs = self._pairs
        idx = k - d
        if idx < len(pairs):
            a, b = pairs[idx]
            return [(a, b, 1.0), (b, a, 1.0)]
        a, b = pairs[idx - len(pairs)]
        return [(a, b, 1j), (b, a, -1j)]

    def basis_matrix(self, k: int) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for r, c, v in self.basis_entries(k):
            out[r, c] = v
        return out

    def to_matrix(self, coords: np.ndarray) -> np.ndarray:
        d = self.dim
        out = np.zeros((d, d), dtype=complex)
        out[np.diag_indices(d)] = coords[:d]
        if self.diagonal:
            return out
        pairs = self._pairs
        if pairs:
            rows, cols = np.array(pairs).T
            sym = coords[d:d + len(pairs)]
            anti = np.zeros(len(pairs)) if self.real else coords[d + len(pairs):]
            out[rows, cols] = sym + 1j * anti
            out[cols, rows] = sym - 1j * anti
        return out


@dataclass
class AffineExpr:
    """constant + Σ fn_i(block_i), a size×size matrix-valued affine map."""
    size: int
    constant: Optional[np.ndarray] = None
    terms: List[Tuple[str, LinearFn]] = field(default_factory=list)

    def __post_init__(self):
        const = np.zeros((self.size, self.size), dtype=complex) if self.constant is None else self.constant
        const = np.atleast_2d(np.asarray(const, dtype=complex))
        if const.shape != (self.size, self.size):
            raise LabInputError(f"constant term must be {self.size}x{self.size}, got {const.shape}")
        self.constant = const

    def add(self, block: str, fn: LinearFn) -> "AffineExpr":
        self.terms.append((block, fn))
        return self

    @classmethod
    def scalar(cls, constant: complex = 0.0) -> "AffineExpr":
        return cls(1, np.array([[constant]], dtype=complex))


@dataclass(eq=False)
class SdpSolution:
    """Outcome of ``solve``; ``values`` is empty when no primal iterate exists."""
    name: str
    status: SdpStatus
    values: Dict[str, np.ndarray]
    primal_objective: float
    dual_objective: float
    gap: float
    violation: float
    iterations: int
    certificate: Optional[np.ndarray] = None

    @property
    def optimal(self) -> bool:
        return self.status == SdpStatus.OPTIMAL

    def to_record(self) -> SdpSolutionRecord:
        return SdpSolutionRecord(
            name=self.name,
            status=self.status.value,
            primal_objective=self.primal_objective,
            dual_objective=self.dual_objective,
            gap=self.gap,
            violation=self.violation,
            iterations=self.iterations,
        )


class SdpProblem:
    """Builder for  minimize/maximize Re(objective)  s.t.  PSD, nonnegativity and equality constraints."""

    def __init__(self, name: str = "sdp"):
        self.name = name
        self.blocks: Dict[str, HermitianBlock] = {}
        self.psd: List[AffineExpr] = []
        self.nonneg: List[AffineExpr] = []
        self.equalities: List[Tuple[AffineExpr, complex]] = []
        self.objective: Optional[AffineExpr] = None
        self.sense = 1.0

    def variable(self, name: str, dim: int, real: bool = False, diagonal: bool = False) -> HermitianBlock:
        if name in self.blocks:
            raise LabInputError(f"duplicate block name {name!r}")
        block = HermitianBlock(name, dim, real=real, diagonal=diagonal)
        self.blocks[name] = block
        return block

    def add_psd(self, expr: AffineExpr) -> None:
        self.psd.append(expr)

    def add_nonneg(self, expr: AffineExpr) -> None:
        """Re(expr_ii) ≥ 0 for every diagonal entry (a single inequality for scalar expressions)."""
        self.nonneg.append(expr)

    def add_equality(self, expr: AffineExpr, target: complex) -> None:
        """Scalar constraint expr = target (real and imaginary parts)."""
        if expr.size != 1:
            raise LabInputError("equality constraints must be scalar expressions")
        self.equalities.append((expr, complex(target)))

    def minimize(self, expr: AffineExpr) -> None:
        self.objective, self.sense = expr, 1.0

    def maximize(self, expr: AffineExpr) -> None:
        self.objective, self.sense = expr, -1.0

    @property
    def offsets(self) -> Dict[str, int]:
        out, pos = {}, 0
        for name, block in self.blocks.items():
            out[name] = pos
            pos += block.n_params
        return out

    @property
    def n_params(self) -> int:
        return sum(b.n_params for b in self.blocks.values())

    def tabulate(self, expr: AffineExpr):
        """Entries (row, col, param, value) of the linear part of ``expr`` on the coordinate basis."""
        offsets = self.offsets
        rows, cols, params, vals = [], [], [], []
        for name, fn in expr.terms:
            if name not in self.blocks:
                raise LabInputError(f"unknown block {name!r} in {self.name}")
            block = self.blocks[name]
            for k in range(block.n_params):
                image = np.atleast_2d(np.asarray(fn(block.basis_matrix(k)), dtype=complex))
                if image.shape != (expr.size, expr.size):
                    raise LabInputError(
                        f"term on {name!r} returns shape {image.shape}, expected {(expr.size, expr.size)}"
                    )
                r, c = np.nonzero(image)
                rows.append(r)
                cols.append(c)
                params.append(np.full(r.size, offsets[name] + k))
                vals.append(image[r, c])
        if not rows:
            empty = np.zeros(0, dtype=int)
            return empty, empty, empty, np.zeros(0, dtype=complex)
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(params), np.concatenate(vals)


def _embed_psd(problem: SdpProblem, expr: AffineExpr):
    """Column-major (G, h) rows of one PSD constraint, real-embedded when complex data occurs."""
    n = problem.n_params
    rows, cols, params, vals = problem.tabulate(expr)
    d = expr.size
    const = expr.constant
    complex_data = bool(np.any(np.abs(vals.imag) > 0) or np.any(np.abs(const.imag) > 0))
    if not complex_data:
        size = d
        g = sparse.coo_matrix((-vals.real, (rows + cols * size, params)), shape=(size * size, n))
        h = const.real.reshape(-1, order="F")
        return size, g, h

    size = 2 * d
    re, im = vals.real, vals.imag
    all_rows = np.concatenate([rows, rows + d, rows, rows + d])
    all_cols = np.concatenate([cols, cols + d, cols + d, cols])
    all_vals = np.concatenate([re, re, -im, im])
    all_params = np.concatenate([params] * 4)
    g = sparse.coo_matrix((-all_vals, (all_rows + all_cols * size, all_params)), shape=(size * size, n))
    h = np.block([[const.real, -const.imag], [const.imag, const.real]]).reshape(-1, order="F")
    return size, g, h


def _diagonal_rows(problem: SdpProblem, expr: AffineExpr):
    rows, cols, params, vals = problem.tabulate(expr)
    on_diag = rows == cols
    g = sparse.coo_matrix(
        (-vals[on_diag].real, (rows[on_diag], params[on_diag])), shape=(expr.size, problem.n_params)
    )
    return sparse.csr_matrix(g), np.diag(expr.constant).real.copy()


def _scalar_row(problem: SdpProblem, expr: AffineExpr):
    n = problem.n_params
    _, _, params, vals = problem.tabulate(expr)
    row = np.zeros(n, dtype=complex)
    np.add.at(row, params, vals)
    return row, complex(expr.constant[0, 0])


def _to_spmatrix(mat: sparse.spmatrix) -> spmatrix:
    coo = sparse.csr_matrix(mat).tocoo()
    return spmatrix(coo.data.tolist(), coo.row.tolist(), coo.col.tolist(), size=coo.shape)


def _violation(g: sparse.csr_matrix, h: np.ndarray, dims: Dict, a, b, x: np.ndarray) -> float:
    slack = h - g @ x
    worst = 0.0
    n_lin = dims["l"]
    if n_lin:
        worst = max(worst, float(np.max(-slack[:n_lin])))
    pos = n_lin
    for size in dims["s"]:
        block = slack[pos:pos + size * size].reshape(size, size, order="F")
        pos += size * size
        worst = max(worst, float(-np.linalg.eigvalsh(0.5 * (block + block.T))[0]))
    if a is not None:
        worst = max(worst, float(np.max(np.abs(a @ x - b))))
    scale = 1.0 + float(np.max(np.abs(h))) if h.size else 1.0
    return max(worst, 0.0) / scale


def solve(problem: SdpProblem, options: Optional[SdpOptions] = None) -> SdpSolution:
    """Solve the program with cvxopt.

    Args:
        problem: Program to solve (needs an objective)
        options: Stopping rules (defaults from configuration)

    Returns:
        SdpSolution; an ``Optimal`` status is downgraded to ``MaxIter`` when the
        duality gap exceeds 1e-6·(1+|primal|) or the relative constraint violation
        exceeds 1e-7

    Raises:
        SolverError: If the program is malformed for the engine or the engine fails
    """
    opts = options or SdpOptions()
    if problem.objective is None:
        raise LabInputError(f"{problem.name}: no objective set")
    n = problem.n_params
    if n == 0:
        raise LabInputError(f"{problem.name}: no variables")

    g_parts, h_parts = [], []
    for expr in problem.nonneg:
        g, h = _diagonal_rows(problem, expr)
        g_parts.append(g)
        h_parts.append(h)
    n_lin = sum(expr.size for expr in problem.nonneg)
    sizes = []
    for expr in problem.psd:
        size, g, h = _embed_psd(problem, expr)
        sizes.append(size)
        g_parts.append(sparse.csr_matrix(g))
        h_parts.append(h)
    if not g_parts:
        raise LabInputError(f"{problem.name}: no inequality constraints")
    g_all = sparse.vstack(g_parts).tocsr()
    h_all = np.concatenate(h_parts)
    dims = {"l": n_lin, "q": [], "s": sizes}

    a_rows, b_vals = [], []
    for expr, target in problem.equalities:
        row, const = _scalar_row(problem, expr)
        a_rows.append(row.real)
        b_vals.append(target.real - const.real)
        if np.any(row.imag != 0) or target.imag != const.imag:
            a_rows.append(row.imag)
            b_vals.append(target.imag - const.imag)
    a_np = np.array(a_rows) if a_rows else None
    b_np = np.array(b_vals) if b_vals else None

    row_obj, const_obj = _scalar_row(problem, problem.objective)
    c_np = problem.sense * row_obj.real

    used = np.asarray(abs(g_all).sum(axis=0)).reshape(-1) > 0
    if a_np is not None:
        used |= np.any(a_np != 0, axis=0)
    if not np.all(used):
        raise SolverError(f"{problem.name}: {int(np.sum(~used))} variable coordinates appear in no constraint")

    try:
        sol = solvers.conelp(
            matrix(c_np),
            _to_spmatrix(g_all),
            matrix(h_all),
            dims,
            None if a_np is None else _to_spmatrix(sparse.csr_matrix(a_np)),
            None if b_np is None else matrix(b_np),
            options=opts.as_cvxopt(),
        )
    except (ValueError, ArithmeticError, TypeError) as e:
        raise SolverError(f"{problem.name}: cvxopt failed: {e}") from e

    raw_status = sol["status"]
    iterations = int(sol.get("iterations") or 0)
    if raw_status == "primal infeasible":
        z = np.array(sol["z"]).reshape(-1) if sol.get("z") is not None else None
        logger.info(f"SDP {problem.name}: Infeasible after {iterations} iterations")
        return SdpSolution(problem.name, SdpStatus.INFEASIBLE, {}, np.nan, np.nan, np.inf, np.inf, iterations, z)
    if raw_status == "dual infeasible":
        logger.warning(f"SDP {problem.name}: objective unbounded")
        return SdpSolution(problem.name, SdpStatus.UNBOUNDED, {}, -problem.sense * np.inf, np.nan, np.inf, np.inf, iterations)
    if sol.get("x") is None:
        raise SolverError(f"{problem.name}: engine returned status {raw_status!r} without an iterate")

    x = np.array(sol["x"]).reshape(-1)
    primal = problem.sense * float(c_np @ x) + const_obj.real
    dual_raw = sol.get("dual objective")
    dual = np.nan if dual_raw is None else problem.sense * float(dual_raw) + const_obj.real
    gap = abs(primal - dual) if np.isfinite(dual) else np.inf
    violation = _violation(g_all, h_all, dims, a_np, b_np, x)

    status = SdpStatus.OPTIMAL if raw_status == "optimal" else SdpStatus.MAX_ITER
    if status == SdpStatus.OPTIMAL and (gap > 1e-6 * (1.0 + abs(primal)) or violation > 1e-7):
        logger.warning(f"SDP {problem.name}: uncertified optimum (gap={gap:.2e}, violation={violation:.2e})")
        status = SdpStatus.MAX_ITER

    offsets = problem.offsets
    values = {
        name: block.to_matrix(x[offsets[name]:offsets[name] + block.n_params])
        for name, block in problem.blocks.items()
    }
    logger.info(f"SDP {problem.name}: {status.value} objective={primal:.10g} iterations={iterations}")
    return SdpSolution(problem.name, status, values, primal, dual, gap, violation, iterations)
