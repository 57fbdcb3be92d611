"""Finite groups given by Cayley tables and normalized unimodular 2-cocycles on them."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from app.errors import InvalidCocycle, InvalidGroup

logger = logging.getLogger(__name__)

MAX_ORDER = 64


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group on {0, ..., order-1} with product cayley[s, t] = s·t."""
    cayley: np.ndarray
    name: str = "G"
    labels: Tuple[str, ...] = ()
    identity: int = field(init=False)
    inverse: np.ndarray = field(init=False)

    def __post_init__(self):
        table = np.asarray(self.cayley)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise InvalidGroup(f"Cayley table must be a non-empty square table, got shape {table.shape}")
        if not np.issubdtype(table.dtype, np.integer):
            if not np.all(np.equal(np.mod(table, 1), 0)):
                raise InvalidGroup("Cayley table entries must be integers")
            table = table.astype(int)
        n = table.shape[0]
        if n > MAX_ORDER:
            raise InvalidGroup(f"group order {n} exceeds the supported maximum {MAX_ORDER}")
        if table.min() < 0 or table.max() >= n:
            raise InvalidGroup(f"Cayley table entries must lie in 0..{n - 1}")
        full = np.arange(n)
        if not all(np.array_equal(np.sort(row), full) for row in table):
            raise InvalidGroup("Cayley table is not a Latin square (row repeats an element)")
        if not all(np.array_equal(np.sort(col), full) for col in table.T):
            raise InvalidGroup("Cayley table is not a Latin square (column repeats an element)")

        # (st)r and s(tr) on all triples
        left = table[table[:, :, None], full[None, None, :]]
        right = table[full[:, None, None], table[None, :, :]]
        if not np.array_equal(left, right):
            s, t, r = (int(v[0]) for v in np.nonzero(left != right))
            raise InvalidGroup(f"Cayley table is not associative at ({s}, {t}, {r})")

        units = [e for e in range(n) if np.array_equal(table[e], full) and np.array_equal(table[:, e], full)]
        if not units:
            raise InvalidGroup("Cayley table has no identity element")
        e = units[0]
        inverse = np.array([int(np.nonzero(table[s] == e)[0][0]) for s in range(n)])
        if not np.all(table[inverse, full] == e):
            raise InvalidGroup("left and right inverses disagree")

        table = table.copy()
        table.setflags(write=False)
        inverse.setflags(write=False)
        labels = tuple(self.labels) if self.labels else tuple(str(s) for s in range(n))
        if len(labels) != n:
            raise InvalidGroup(f"expected {n} element labels, got {len(labels)}")
        object.__setattr__(self, "cayley", table)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "identity", e)
        object.__setattr__(self, "inverse", inverse)

    @property
    def order(self) -> int:
        return self.cayley.shape[0]

    def mul(self, s: int, t: int) -> int:
        return int(self.cayley[s, t])

    def inv(self, s: int) -> int:
        return int(self.inverse[s])

    def is_subgroup(self, elements: Sequence[int]) -> bool:
        """Finite subsets closed under the product are subgroups."""
        h = set(int(s) for s in elements)
        if not h or not all(0 <= s < self.order for s in h):
            return False
        return all(self.mul(s, t) in h for s in h for t in h)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))


@dataclass(frozen=True, eq=False)
class TwoCocycle:
    """Normalized 2-cocycle σ: G×G → 𝕋 stored as a complex table."""
    group: FiniteGroup
    sigma: np.ndarray
    name: str = "sigma"

    def __post_init__(self):
        g = self.group
        n = g.order
        sigma = np.asarray(self.sigma, dtype=complex)
        if sigma.shape != (n, n):
            raise InvalidCocycle(f"cocycle table must be {n}x{n}, got {sigma.shape}")
        if not np.all(np.isfinite(sigma)):
            raise InvalidCocycle("cocycle table has non-finite entries")
        if np.max(np.abs(np.abs(sigma) - 1.0)) > 1e-12:
            raise InvalidCocycle("cocycle values must have modulus 1")
        e = g.identity
        if np.max(np.abs(sigma[e, :] - 1.0)) > 1e-12 or np.max(np.abs(sigma[:, e] - 1.0)) > 1e-12:
            raise InvalidCocycle("cocycle is not normalized: sigma(s, e) = sigma(e, s) = 1 fails")

        c = g.cayley
        full = np.arange(n)
        # σ(s,t)σ(st,r) = σ(t,r)σ(s,tr)
        lhs = sigma[:, :, None] * sigma[c[:, :, None], full[None, None, :]]
        rhs = sigma[None, :, :] * sigma[full[:, None, None], c[None, :, :]]
        defect = float(np.max(np.abs(lhs - rhs)))
        if defect > 1e-10:
            raise InvalidCocycle(f"cocycle identity fails (max defect {defect:.3e})")

        sigma = sigma.copy()
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    @property
    def is_trivial(self) -> bool:
        return bool(np.all(self.sigma == 1.0))


def cyclic_group(n: int) -> FiniteGroup:
    """Z_n."""
    if n < 1:
        raise InvalidGroup(f"cyclic group order must be positive, got {n}")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"Z{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """G × H with (g, h) stored at index g·|H| + h."""
    ng, nh = g.order, h.order
    table = (g.cayley[:, None, :, None] * nh + h.cayley[None, :, None, :]).reshape(ng * nh, ng * nh)
    labels = tuple(f"({a},{b})" for a in g.labels for b in h.labels)
    return FiniteGroup(table, name=f"{g.name}x{h.name}", labels=labels)


def symmetric_group(k: int) -> FiniteGroup:
    """S_k (k ≤ 4) with (s·t)(x) = s(t(x)); index 0 is the identity permutation."""
    if not 1 <= k <= 4:
        raise InvalidGroup(f"symmetric groups are supported for 1 <= k <= 4, got {k}")
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    table = np.array([[index[tuple(s[t[x]] for x in range(k))] for t in perms] for s in perms])
    labels = tuple("".join(str(x + 1) for x in p) for p in perms)
    return FiniteGroup(table, name=f"S{k}", labels=labels)


def dihedral_group(n: int) -> FiniteGroup:
    """D_n of order 2n; r^a s^b is stored at index a + n·b."""
    if n < 1:
        raise InvalidGroup(f"dihedral group needs n >= 1, got {n}")
    size = 2 * n
    table = np.zeros((size, size), dtype=int)
    for x in range(size):
        a, b = x % n, x // n
        for y in range(size):
            c, d = y % n, y // n
            table[x, y] = (a + (-1) ** b * c) % n + n * ((b + d) % 2)
    labels = tuple(("r%d" % (x % n)) + ("s" if x >= n else "") for x in range(size))
    return FiniteGroup(table, name=f"D{n}", labels=labels)


def trivial_cocycle(g: FiniteGroup) -> TwoCocycle:
    return TwoCocycle(g, np.ones((g.order, g.order), dtype=complex), name="trivial")


def bicharacter_cocycle(n: int, group: Optional[FiniteGroup] = None) -> TwoCocycle:
    """σ((a,b),(a',b')) = ω^{b·a'} on Z_n × Z_n, ω = e^{2πi/n}.

    For n = 2 this is the Pauli cocycle, whose twisted group algebra is M_2.
    """
    g = group or direct_product(cyclic_group(n), cyclic_group(n))
    if g.order != n * n:
        raise InvalidGroup(f"bicharacter cocycle needs Z{n}xZ{n}, got order {g.order}")
    a = np.arange(n * n) // n
    b = np.arange(n * n) % n
    omega = np.exp(2j * np.pi / n)
    sigma = omega ** ((b[:, None] * a[None, :]) % n)
    return TwoCocycle(g, sigma, name=f"bicharacter{n}")


def coboundary(g: FiniteGroup, beta) -> TwoCocycle:
    """σ(s,t) = β(s)β(t)/β(st) for unimodular β with β(e) = 1."""
    beta = np.asarray(beta, dtype=complex)
    if beta.shape != (g.order,):
        raise InvalidCocycle(f"beta must have {g.order} entries, got shape {beta.shape}")
    if np.max(np.abs(np.abs(beta) - 1.0)) > 1e-12:
        raise InvalidCocycle("beta values must have modulus 1")
    if abs(beta[g.identity] - 1.0) > 1e-12:
        raise InvalidCocycle("beta must take the value 1 at the identity")
    sigma = beta[:, None] * beta[None, :] / beta[g.cayley]
    return TwoCocycle(g, sigma, name="coboundary")
