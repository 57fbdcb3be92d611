"""Dense complex linear algebra: Jacobi eigensolver, SVD, Schatten norms, tensor plumbing.

Matrices are plain ``numpy`` complex arrays. Tensor products and partial traces
flatten indices lexicographically (first factor slow) everywhere in the package.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg as sla

from app.config import config
from app.errors import (
    DimensionMismatch,
    InvalidP,
    LabInputError,
    NoConvergence,
    NotHermitian,
)

logger = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigen-decomposition H = V diag(eigenvalues) V* with eigenvalues descending."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def min_eigenvector(self) -> np.ndarray:
        return self.eigenvectors[:, -1]


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite 2-D complex array."""
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LabInputError(f"{name} has non-finite entries")
    return arr


def matrix_unit(i: int, j: int, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Matrix unit e_ij of shape rows × cols."""
    e = np.zeros((rows, rows if cols is None else cols), dtype=complex)
    e[i, j] = 1.0
    return e


def check_exponent(p: float) -> float:
    """Validate a Schatten exponent; ``math.inf`` is the sentinel for p = ∞."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidP(f"Schatten exponent must satisfy p >= 1 or p = inf, got {p}")
    return p


def parse_exponent(text: str) -> float:
    """Parse a CLI exponent such as ``2``, ``1.5``, ``inf`` or ``∞``."""
    if str(text).strip().lower() in ("inf", "infinity", "∞"):
        return INF
    return check_exponent(float(text))


def dual_exponent(p: float) -> float:
    """Conjugate exponent p* with 1/p + 1/p* = 1."""
    p = check_exponent(p)
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _hermitian_residual(h: np.ndarray) -> float:
    return float(np.linalg.norm(h - h.conj().T))


def herm_eig(h, max_sweeps: Optional[int] = None) -> Spectrum:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Each rotation first removes the phase of the pivot a_pq and then applies the
    real symmetric Jacobi rotation that annihilates it. Pairs are visited in fixed
    row-cyclic order, so the result is bitwise reproducible.

    Args:
        h: Square Hermitian matrix
        max_sweeps: Sweep limit (defaults to ``config.JACOBI_MAX_SWEEPS``)

    Returns:
        Spectrum with eigenvalues sorted descending

    Raises:
        NotHermitian: If ``h`` is not square or not Hermitian within 1e-10·(1+‖h‖_F)
        NoConvergence: If the off-diagonal mass does not vanish within the sweep limit
    """
    a = as_matrix(h, "H").copy()
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"Hermitian input must be square, got shape {a.shape}")
    fro = float(np.linalg.norm(a))
    if _hermitian_residual(a) > 1e-10 * (1.0 + fro):
        raise NotHermitian(f"matrix is not Hermitian (residual {_hermitian_residual(a):.3e})")

    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    sweeps = config.JACOBI_MAX_SWEEPS if max_sweeps is None else max_sweeps
    target = 1e-14 * max(n, 10) * (1.0 + fro)
    skip = 1e-18 * (1.0 + fro)

    for sweep in range(sweeps + 1):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= target:
            logger.debug(f"Jacobi converged after {sweep} sweeps (n={n}, off={off:.2e})")
            break
        if sweep == sweeps:
            raise NoConvergence(f"Jacobi eigensolver exceeded {sweeps} sweeps (off-diagonal {off:.3e})")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # R = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                r00, r01 = c, s
                r10, r11 = -s * np.conj(phase), c * np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = col_p * r00 + col_q * r10
                a[:, q] = col_p * r01 + col_q * r11
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = np.conj(r00) * row_p + np.conj(r10) * row_q
                a[q, :] = np.conj(r01) * row_p + np.conj(r11) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = vp * r00 + vq * r10
                v[:, q] = vp * r01 + vq * r11

    eigenvalues = np.real(np.diag(a))
    order = np.argsort(-eigenvalues, kind="stable")
    return Spectrum(eigenvalues=eigenvalues[order], eigenvectors=v[:, order])


def svd(x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition X = U diag(s) V*.

    Returns:
        (U, s, V) with ``s`` descending and orthonormal columns in U and V
    """
    x = as_matrix(x, "X")
    try:
        u, s, vh = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NoConvergence(f"SVD did not converge: {e}") from e
    return u, s, vh.conj().T


def singular_values(x) -> np.ndarray:
    try:
        return np.linalg.svd(as_matrix(x, "X"), compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise NoConvergence(f"SVD did not converge: {e}") from e


def norm_of_singular_values(s: np.ndarray, p: float) -> float:
    """(Σ s_i^p)^{1/p}, evaluated on s/max(s) so large exponents do not overflow."""
    top = float(np.max(s)) if s.size else 0.0
    if top == 0.0:
        return 0.0
    if p == INF:
        return top
    return top * float(np.sum((s / top) ** p)) ** (1.0 / p)


def schatten_norm(x, p: float) -> float:
    """Schatten p-norm; p = ``INF`` gives the operator norm."""
    p = check_exponent(p)
    return norm_of_singular_values(singular_values(x), p)


def polar(x) -> Tuple[np.ndarray, np.ndarray]:
    """Polar decomposition X = W |X| with W a partial isometry (unitary when square)."""
    w, mod = sla.polar(as_matrix(x, "X"), side="right")
    return w, mod


def modulus(x) -> np.ndarray:
    """|X| = (X* X)^{1/2}."""
    return polar(x)[1]


def duality_map(x, p: float) -> np.ndarray:
    """Norming functional J of X in S^p: trace(J* X) = ‖X‖_p and ‖J‖_{p*} = 1.

    Defined for 1 < p < ∞ as U (Σ/σ_max)^{p-1} V* normalised in S^{p*}. A zero input
    returns zero.
    """
    p = check_exponent(p)
    if p in (1.0, INF):
        raise InvalidP("duality_map needs 1 < p < inf; smooth the exponent first")
    u, s, v = svd(x)
    top = float(s[0]) if s.size else 0.0
    if top == 0.0:
        return np.zeros_like(as_matrix(x))
    weights = (s / top) ** (p - 1.0)
    j = (u * weights) @ v.conj().T
    return j / norm_of_singular_values(weights, dual_exponent(p))


def kron(a, b) -> np.ndarray:
    """Kronecker product with (A⊗B)[(i,k),(j,l)] = A[i,j]·B[k,l]."""
    return np.kron(as_matrix(a, "A"), as_matrix(b, "B"))


def partial_trace(x, dims: Tuple[int, int], side: str) -> np.ndarray:
    """Partial trace on an n·m system.

    Args:
        x: Square matrix of size n·m
        dims: Factor dimensions (n, m), first factor slow
        side: ``"first"`` traces out the n-dimensional factor, ``"second"`` the m one
    """
    x = as_matrix(x, "X")
    n, m = dims
    if x.shape != (n * m, n * m):
        raise DimensionMismatch(f"partial_trace expects a {n * m}x{n * m} matrix, got {x.shape}")
    t = x.reshape(n, m, n, m)
    if side == "first":
        return np.einsum("ikil->kl", t)
    if side == "second":
        return np.einsum("ikjk->ij", t)
    raise LabInputError(f"side must be 'first' or 'second', got {side!r}")


def vec(x: np.ndarray) -> np.ndarray:
    """Row-major vectorisation (consistent with ``liouville``)."""
    return np.asarray(x).reshape(-1)


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v).reshape(rows, cols)
