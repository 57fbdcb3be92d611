"""Twisted group algebras VN(G,σ) of finite groups and their Fourier and Schur multipliers.

The algebra is realised on ℓ²_G by the twisted left regular representation
λ_{σ,s} ε_t = σ(s,t) ε_{st}. Fourier multipliers are returned as their canonical
extension to the full matrix algebra M_{|G|}: x ↦ Σ_s φ(s)·tr(λ_s* x)·λ_s, with tr
the normalised trace, which restricts to λ_s ↦ φ(s)λ_s on the algebra.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from app.errors import (
    DimensionMismatch,
    InvalidCocycle,
    InvalidGroup,
    NotASubgroup,
    NotSquare,
)
from app.groups.finite_group import FiniteGroup, TwoCocycle, trivial_cocycle
from app.linalg.core import as_matrix
from app.superop.superoperator import SuperOperator, apply, block_matrix_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupAlgebra:
    """The generators λ_{σ,s}, stacked as lambdas[s]."""
    group: FiniteGroup
    cocycle: TwoCocycle
    lambdas: np.ndarray

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def name(self) -> str:
        if self.cocycle.is_trivial:
            return self.group.name
        return f"{self.group.name}[{self.cocycle.name}]"

    def lam(self, s: int) -> np.ndarray:
        return self.lambdas[s].copy()

    def trace_functional(self, x) -> complex:
        """τ(x) = ⟨ε_e, x ε_e⟩."""
        e = self.group.identity
        return complex(as_matrix(x, "x")[e, e])

    def normalized_trace(self, x) -> complex:
        x = as_matrix(x, "x")
        return complex(np.trace(x)) / self.order

    def coefficients(self, x) -> np.ndarray:
        """Coordinates tr(λ_s* x) of the conditional expectation of x onto the algebra."""
        x = as_matrix(x, "x")
        return np.einsum("sij,ij->s", np.conj(self.lambdas), x) / self.order

    def conditional_expectation(self, x) -> np.ndarray:
        """Trace-preserving projection of M_{|G|} onto span{λ_s}."""
        return np.einsum("s,sij->ij", self.coefficients(x), self.lambdas)

    def element(self, coefficients) -> np.ndarray:
        """Σ_s c_s λ_s."""
        c = _symbol_vector(self, coefficients)
        return np.einsum("s,sij->ij", c, self.lambdas)

    def center_dimension(self, tol: float = 1e-9) -> int:
        """Dimension of the centre of span{λ_s}.

        Column s of the system holds the commutators [λ_s, λ_t] for every t; the
        centre is its kernel.
        """
        lam = self.lambdas
        comm = np.einsum("sij,tjk->tsik", lam, lam) - np.einsum("tij,sjk->tsik", lam, lam)
        system = comm.transpose(0, 2, 3, 1).reshape(-1, self.order)
        rank = int(np.linalg.matrix_rank(system, tol=tol))
        return self.order - rank


def _symbol_vector(alg: GroupAlgebra, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.shape != (alg.order,):
        raise DimensionMismatch(f"symbol on {alg.name} needs {alg.order} values, got {phi.size}")
    if not np.all(np.isfinite(phi)):
        raise DimensionMismatch("symbol has non-finite values")
    return phi


def build_algebra(group: FiniteGroup, cocycle: Optional[TwoCocycle] = None) -> GroupAlgebra:
    """Twisted left regular representation of (G, σ); σ defaults to the trivial cocycle.

    Raises:
        InvalidGroup: If the cocycle belongs to a different group
        InvalidCocycle: If the generated matrices violate the twisted relations
    """
    sigma = cocycle or trivial_cocycle(group)
    if sigma.group is not group and not np.array_equal(sigma.group.cayley, group.cayley):
        raise InvalidGroup("cocycle is defined on a different group")
    n = group.order
    lambdas = np.zeros((n, n, n), dtype=complex)
    full = np.arange(n)
    for s in range(n):
        lambdas[s, group.cayley[s, full], full] = sigma.sigma[s, full]

    c = group.cayley
    products = np.einsum("sij,tjk->stik", lambdas, lambdas)
    expected = sigma.sigma[:, :, None, None] * lambdas[c]
    adjoints = np.conj(lambdas.transpose(0, 2, 1))
    expected_adj = np.conj(sigma.sigma[full, group.inverse])[:, None, None] * lambdas[group.inverse]
    defect = max(float(np.max(np.abs(products - expected))), float(np.max(np.abs(adjoints - expected_adj))))
    if defect > 1e-12:
        raise InvalidCocycle(f"twisted relations fail for {group.name} (defect {defect:.3e})")

    lambdas.setflags(write=False)
    logger.debug(f"built twisted group algebra of {group.name} (order {n}, cocycle {sigma.name})")
    return GroupAlgebra(group=group, cocycle=sigma, lambdas=lambdas)


def fourier_multiplier(alg: GroupAlgebra, phi) -> SuperOperator:
    """Extension M̃_φ of the Fourier multiplier λ_s ↦ φ(s)λ_s to M_{|G|}.

    The Choi matrix is (1/|G|) Σ_s φ(s)·conj(λ_s) ⊗ λ_s.
    """
    phi = _symbol_vector(alg, phi)
    n = alg.order
    tensor = np.einsum("s,sij,skl->ikjl", phi, np.conj(alg.lambdas), alg.lambdas) / n
    return SuperOperator(n, n, tensor.reshape(n * n, n * n))


def block_fourier_multiplier(alg: GroupAlgebra, symbols) -> SuperOperator:
    """[[x_ab]] ↦ [[M̃_{φ_ab}(x_ab)]] for a 2×2 array of symbols (``None`` = zero)."""
    maps = [[None if phi is None else fourier_multiplier(alg, phi) for phi in row] for row in symbols]
    return block_matrix_map(maps)


def schur_multiplier(a) -> SuperOperator:
    """M_A: [x_ij] ↦ [A_ij·x_ij]."""
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"Schur symbol must be square, got shape {a.shape}")
    n = a.shape[0]
    tensor = np.zeros((n, n, n, n), dtype=complex)
    idx = np.arange(n)
    tensor[idx[:, None], idx[:, None], idx[None, :], idx[None, :]] = a
    return SuperOperator(n, n, tensor.reshape(n * n, n * n))


def triangular_symbol(n: int) -> np.ndarray:
    """Upper-triangular 0/1 symbol (A_ij = 1 for i ≤ j) of the triangular truncation."""
    return np.triu(np.ones((n, n)))


def project_schur(t: SuperOperator) -> np.ndarray:
    """Symbol φ_ij = trace(T(e_ij)·e_ij*) of the averaged Schur multiplier."""
    if not t.is_square:
        raise NotSquare(f"project_schur needs a map M_n -> M_n, got M_{t.in_dim} -> M_{t.out_dim}")
    idx = np.arange(t.in_dim)
    return t.tensor[idx[:, None], idx[:, None], idx[None, :], idx[None, :]].copy()


def project_fourier(alg: GroupAlgebra, t: SuperOperator, subgroup: Optional[Sequence[int]] = None) -> np.ndarray:
    """Symbol φ(s) = tr(T(λ_s)·λ_s*) on the subgroup H and 0 off H.

    Args:
        alg: Twisted group algebra realised in M_{|G|}
        t: Map on M_{|G|}
        subgroup: Element indices of H (defaults to the whole group)

    Raises:
        NotASubgroup: If ``subgroup`` is not closed under the group law
    """
    n = alg.order
    if (t.in_dim, t.out_dim) != (n, n):
        raise DimensionMismatch(f"map must act on M_{n}, got M_{t.in_dim} -> M_{t.out_dim}")
    h = list(range(n)) if subgroup is None else sorted(set(int(s) for s in subgroup))
    if not alg.group.is_subgroup(h):
        raise NotASubgroup(f"{h} is not a subgroup of {alg.group.name}")
    phi = np.zeros(n, dtype=complex)
    for s in h:
        lam = alg.lambdas[s]
        phi[s] = np.trace(apply(t, lam) @ lam.conj().T) / n
    return phi


def kernel_positive_type_gram(alg: GroupAlgebra, symbols: Mapping, points: Sequence[Tuple]) -> np.ndarray:
    """Gram matrix [φ_{i_k i_l}(s_k⁻¹ s_l)]_{k,l} of a family of symbols on points (i, s).

    ``symbols`` maps index pairs (i, j) to symbols on G (a nested sequence works as well).
    """
    g = alg.group
    size = len(points)
    gram = np.zeros((size, size), dtype=complex)
    cache = {}
    for k, (i, s) in enumerate(points):
        for l, (j, t) in enumerate(points):
            if (i, j) not in cache:
                cache[(i, j)] = _symbol_vector(alg, _lookup(symbols, i, j))
            gram[k, l] = cache[(i, j)][g.mul(g.inv(s), t)]
    return gram


def _lookup(symbols, i, j):
    try:
        if isinstance(symbols, Mapping):
            return symbols[(i, j)]
        return symbols[i][j]
    except (KeyError, IndexError) as e:
        raise DimensionMismatch(f"no symbol for index pair ({i}, {j})") from e


def check_symbol(alg: GroupAlgebra, phi) -> np.ndarray:
    """φ̌(s) = φ(s⁻¹)."""
    return _symbol_vector(alg, phi)[alg.group.inverse].copy()


def conjugate_symbol(phi) -> np.ndarray:
    return np.conj(np.asarray(phi, dtype=complex))


def is_selfadjoint_symbol(alg: GroupAlgebra, phi, tol: float = 1e-12) -> bool:
    """M_φ is selfadjoint exactly when φ(s⁻¹) = conj(φ(s))."""
    phi = _symbol_vector(alg, phi)
    return bool(np.max(np.abs(check_symbol(alg, phi) - np.conj(phi))) <= tol)


def multiplier_polynomial(phi, coefficients) -> np.ndarray:
    """Symbol P∘φ of P(M_φ) for P(z) = Σ_k a_k z^k."""
    return np.polynomial.polynomial.polyval(np.asarray(phi, dtype=complex), np.asarray(coefficients, dtype=complex))


def unit_symbol(alg: GroupAlgebra) -> np.ndarray:
    return np.ones(alg.order, dtype=complex)


def delta_symbol(alg: GroupAlgebra) -> np.ndarray:
    """δ_e, the symbol of the trace x ↦ τ(x)·1."""
    phi = np.zeros(alg.order, dtype=complex)
    phi[alg.group.identity] = 1.0
    return phi


def random_positive_definite_symbol(group: FiniteGroup, rng: np.random.Generator) -> np.ndarray:
    """Real symmetric positive definite ψ with ψ(e) = 1.

    ψ(s) = Σ_t f(t)f(ts) / Σ_t f(t)² is a normalised coefficient of the right regular
    representation, so M_ψ is unital and completely positive for every cocycle.
    """
    f = rng.standard_normal(group.order)
    f[group.identity] += 1.0
    values = np.array([float(np.dot(f, f[group.cayley[:, s]])) for s in range(group.order)])
    return values / float(np.dot(f, f))


def random_decomposable_symbol(group: FiniteGroup, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    """Real symmetric φ = aψ₊ − bψ₋ with a + b ≤ radius, so ‖M_φ‖_dec ≤ radius."""
    psi_plus = random_positive_definite_symbol(group, rng)
    psi_minus = random_positive_definite_symbol(group, rng)
    total = radius * float(rng.uniform(0.2, 1.0))
    a = total * float(rng.uniform(0.0, 1.0))
    return a * psi_plus - (total - a) * psi_minus
