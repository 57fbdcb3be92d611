"""Linear maps between matrix algebras, stored Choi-first.

A map T: M_n → M_m is kept as its Choi matrix C(T) = Σ_ij e_ij ⊗ T(e_ij), so that
C(T)[(i,k),(j,l)] = T(e_ij)[k,l]. Everything else (action, Liouville matrix,
opposite, adjoints, 2×2 block maps, amplifications) is derived from it by index
reshuffling.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from app.errors import DimensionMismatch, NotSquare
from app.linalg.core import as_matrix, matrix_unit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """Linear map M_n → M_m given by its (n·m)×(n·m) Choi matrix."""
    in_dim: int
    out_dim: int
    choi: np.ndarray

    def __post_init__(self):
        size = self.in_dim * self.out_dim
        choi = as_matrix(self.choi, "choi").copy()
        if choi.shape != (size, size):
            raise DimensionMismatch(
                f"Choi matrix of a map M_{self.in_dim} -> M_{self.out_dim} must be "
                f"{size}x{size}, got {choi.shape}"
            )
        choi.setflags(write=False)
        object.__setattr__(self, "choi", choi)

    @property
    def tensor(self) -> np.ndarray:
        """Choi entries as a 4-tensor t[i, k, j, l] = T(e_ij)[k, l]."""
        return self.choi.reshape(self.in_dim, self.out_dim, self.in_dim, self.out_dim)

    def image(self, i: int, j: int) -> np.ndarray:
        """T(e_ij)."""
        return self.tensor[i, :, j, :].copy()

    @property
    def is_square(self) -> bool:
        return self.in_dim == self.out_dim

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def __add__(self, other: "SuperOperator") -> "SuperOperator":
        _check_same_shape(self, other)
        return SuperOperator(self.in_dim, self.out_dim, self.choi + other.choi)

    def __sub__(self, other: "SuperOperator") -> "SuperOperator":
        _check_same_shape(self, other)
        return SuperOperator(self.in_dim, self.out_dim, self.choi - other.choi)

    def __neg__(self) -> "SuperOperator":
        return SuperOperator(self.in_dim, self.out_dim, -self.choi)

    def __mul__(self, alpha: complex) -> "SuperOperator":
        return SuperOperator(self.in_dim, self.out_dim, complex(alpha) * self.choi)

    __rmul__ = __mul__

    def __matmul__(self, other: "SuperOperator") -> "SuperOperator":
        return compose(self, other)


@dataclass(frozen=True, eq=False)
class BlockMap:
    """[[a, b], [c, d]] ↦ [[v1(a), t(b)], [t°(c), v2(d)]] on M_2(M_n) → M_2(M_m)."""
    v1: SuperOperator
    t: SuperOperator
    v2: SuperOperator
    assembled: SuperOperator


def _check_same_shape(a: SuperOperator, b: SuperOperator) -> None:
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim):
        raise DimensionMismatch(
            f"maps act between different algebras: M_{a.in_dim}->M_{a.out_dim} "
            f"vs M_{b.in_dim}->M_{b.out_dim}"
        )


def from_action(n: int, m: int, action: Sequence[np.ndarray]) -> SuperOperator:
    """Assemble a map from the images of all matrix units.

    Args:
        n: Input dimension
        m: Output dimension
        action: n² images ordered lexicographically, action[i*n + j] = T(e_ij)

    Returns:
        SuperOperator with the corresponding Choi matrix
    """
    if len(action) != n * n:
        raise DimensionMismatch(f"expected {n * n} unit images, got {len(action)}")
    tensor = np.zeros((n, m, n, m), dtype=complex)
    for idx, img in enumerate(action):
        img = as_matrix(img, "image")
        if img.shape != (m, m):
            raise DimensionMismatch(f"unit image {idx} must be {m}x{m}, got {img.shape}")
        i, j = divmod(idx, n)
        tensor[i, :, j, :] = img
    return SuperOperator(n, m, tensor.reshape(n * m, n * m))


def from_function(n: int, m: int, fn: Callable[[np.ndarray], np.ndarray]) -> SuperOperator:
    """Tabulate a linear function on the matrix units of M_n."""
    return from_action(n, m, [fn(matrix_unit(i, j, n)) for i in range(n) for j in range(n)])


def apply(t: SuperOperator, x) -> np.ndarray:
    """T(x) = Σ_ij x_ij T(e_ij)."""
    x = as_matrix(x, "x")
    if x.shape != (t.in_dim, t.in_dim):
        raise DimensionMismatch(f"map acts on {t.in_dim}x{t.in_dim} matrices, got {x.shape}")
    return np.einsum("ij,ikjl->kl", x, t.tensor)


def liouville(t: SuperOperator) -> np.ndarray:
    """Natural representation L with vec(T(x)) = L vec(x), row-major vec."""
    return t.tensor.transpose(1, 3, 0, 2).reshape(t.out_dim ** 2, t.in_dim ** 2)


def from_liouville(n: int, m: int, mat: np.ndarray) -> SuperOperator:
    tensor = np.asarray(mat, dtype=complex).reshape(m, m, n, n).transpose(2, 0, 3, 1)
    return SuperOperator(n, m, tensor.reshape(n * m, n * m))


def compose(t: SuperOperator, s: SuperOperator) -> SuperOperator:
    """T∘S (S applied first)."""
    if s.out_dim != t.in_dim:
        raise DimensionMismatch(f"cannot compose M_{s.out_dim}-valued map with map on M_{t.in_dim}")
    return from_liouville(s.in_dim, t.out_dim, liouville(t) @ liouville(s))


def opposite(t: SuperOperator) -> SuperOperator:
    """T°(x) = T(x*)*; its Choi matrix is the conjugate transpose of C(T)."""
    return SuperOperator(t.in_dim, t.out_dim, t.choi.conj().T)


def adjoint(t: SuperOperator) -> SuperOperator:
    """Banach adjoint for the bilinear trace pairing: tr(T(x) y) = tr(x T*(y))."""
    tensor = t.tensor.transpose(3, 2, 1, 0)
    return SuperOperator(t.out_dim, t.in_dim, tensor.reshape(t.in_dim * t.out_dim, t.in_dim * t.out_dim))


def hs_adjoint(t: SuperOperator) -> SuperOperator:
    """Hilbert–Schmidt adjoint: tr(T(x)* y) = tr(x* T†(y))."""
    return from_liouville(t.out_dim, t.in_dim, liouville(t).conj().T)


def identity_map(n: int) -> SuperOperator:
    return from_function(n, n, lambda x: x)


def zero_map(n: int, m: int) -> SuperOperator:
    return SuperOperator(n, m, np.zeros((n * m, n * m), dtype=complex))


def transpose_map(n: int) -> SuperOperator:
    return from_function(n, n, lambda x: x.T)


def trace_map(n: int, m: int) -> SuperOperator:
    """x ↦ trace(x)·I_m."""
    return from_function(n, m, lambda x: np.trace(x) * np.eye(m))


def conjugation_map(u) -> SuperOperator:
    """x ↦ U x U*."""
    u = as_matrix(u, "U")
    return from_function(u.shape[1], u.shape[0], lambda x: u @ x @ u.conj().T)


def kraus_map(kraus: Sequence[np.ndarray]) -> SuperOperator:
    """x ↦ Σ_r K_r x K_r* (completely positive by construction)."""
    ks = [as_matrix(k, "K") for k in kraus]
    m, n = ks[0].shape
    return from_function(n, m, lambda x: sum(k @ x @ k.conj().T for k in ks))


def commutative_map(b) -> SuperOperator:
    """Map ℓ^∞_n → ℓ^∞_m with coordinate matrix B, on the diagonal subalgebras.

    e_kk ↦ diag(B[:, k]) and off-diagonal units go to zero, so the map factors
    through the diagonal conditional expectation.
    """
    b = as_matrix(b, "B")
    m, n = b.shape
    tensor = np.zeros((n, m, n, m), dtype=complex)
    for k in range(n):
        tensor[k, :, k, :] = np.diag(b[:, k])
    return SuperOperator(n, m, tensor.reshape(n * m, n * m))


def unitary_row_map(images: Sequence[np.ndarray]) -> SuperOperator:
    """ℓ^∞_k → M_m with e_j ↦ u_j (any matrices; unitaries in the classical example)."""
    us = [as_matrix(u, "u") for u in images]
    k, m = len(us), us[0].shape[0]
    tensor = np.zeros((k, m, k, m), dtype=complex)
    for j, u in enumerate(us):
        if u.shape != (m, m):
            raise DimensionMismatch("all images must share one square shape")
        tensor[j, :, j, :] = u
    return SuperOperator(k, m, tensor.reshape(k * m, k * m))


def has_diagonal_input(t: SuperOperator, tol: float = 0.0) -> bool:
    """True when T(e_ij) = 0 for every i ≠ j, i.e. T is defined on ℓ^∞_n."""
    tensor = t.tensor
    n = t.in_dim
    off = ~np.eye(n, dtype=bool)
    return bool(np.all(np.abs(tensor.transpose(0, 2, 1, 3)[off]) <= tol))


def block_choi(chois, n: int, m: int) -> np.ndarray:
    """Choi matrix of the 2×2 block-of-maps [[T_ab]] on M_2(M_n) → M_2(M_m).

    Args:
        chois: 2×2 nested sequence of (n·m)×(n·m) Choi matrices, ``None`` for zero blocks
        n: Input dimension of each block map
        m: Output dimension of each block map
    """
    out = np.zeros((2, n, 2, m, 2, n, 2, m), dtype=complex)
    for a in range(2):
        for b in range(2):
            c = chois[a][b]
            if c is not None:
                out[a, :, a, :, b, :, b, :] = np.asarray(c).reshape(n, m, n, m)
    return out.reshape(4 * n * m, 4 * n * m)


def block_matrix_map(maps) -> SuperOperator:
    """[[x_ab]] ↦ [[T_ab(x_ab)]] for a 2×2 array of maps (``None`` = zero)."""
    present = [t for row in maps for t in row if t is not None]
    if not present:
        raise DimensionMismatch("at least one block map is required")
    n, m = present[0].in_dim, present[0].out_dim
    for t in present:
        if (t.in_dim, t.out_dim) != (n, m):
            raise DimensionMismatch("block maps must share input and output dimensions")
    chois = [[None if t is None else t.choi for t in row] for row in maps]
    return SuperOperator(2 * n, 2 * m, block_choi(chois, n, m))


def corner(t: SuperOperator, a: int, b: int) -> SuperOperator:
    """Extract the (a, b) block map of a map on M_2(M_n) → M_2(M_m)."""
    if t.in_dim % 2 or t.out_dim % 2:
        raise DimensionMismatch("corner needs even dimensions")
    n, m = t.in_dim // 2, t.out_dim // 2
    tensor = t.choi.reshape(2, n, 2, m, 2, n, 2, m)[a, :, a, :, b, :, b, :]
    return SuperOperator(n, m, tensor.reshape(n * m, n * m))


def block2(v1: SuperOperator, t: SuperOperator, v2: SuperOperator) -> BlockMap:
    """The block map [[v1, T], [T°, v2]] whose complete positivity defines decomposability."""
    _check_same_shape(v1, t)
    _check_same_shape(v2, t)
    assembled = block_matrix_map([[v1, t], [opposite(t), v2]])
    return BlockMap(v1=v1, t=t, v2=v2, assembled=assembled)


def tilde(t: SuperOperator) -> SuperOperator:
    """[[0, T], [T°, 0]] on M_2(M_n), a selfadjoint map carrying T in its corner."""
    if not t.is_square:
        raise NotSquare(f"tilde needs a map M_n -> M_n, got M_{t.in_dim} -> M_{t.out_dim}")
    return block_matrix_map([[None, t], [opposite(t), None]])


def amplify(t: SuperOperator, d: int) -> SuperOperator:
    """Id_{M_d} ⊗ T acting on M_d(M_n) → M_d(M_m)."""
    if d < 1:
        raise DimensionMismatch(f"amplification degree must be >= 1, got {d}")
    if d == 1:
        return t
    n, m = t.in_dim, t.out_dim
    eye = np.eye(d)
    tensor = np.einsum("ac,be,ikjl->aickbjel", eye, eye, t.tensor)
    size = d * n * d * m
    return SuperOperator(d * n, d * m, tensor.reshape(size, size))


def linear_combination(alpha: complex, t: SuperOperator, beta: complex, s: SuperOperator) -> SuperOperator:
    """αT + βS."""
    _check_same_shape(t, s)
    return SuperOperator(t.in_dim, t.out_dim, complex(alpha) * t.choi + complex(beta) * s.choi)


def abs_map(b) -> SuperOperator:
    """Commutative map with coordinate matrix |B| (entrywise modulus)."""
    return commutative_map(np.abs(as_matrix(b, "B")))
