"""Random maps, symbols and polynomials for the verification batteries.

Every draw takes an explicit generator; suites obtain one per (suite, trial) from
``app.linalg.streams.generator`` so any single trial can be replayed alone.
"""

from typing import Optional

import numpy as np

from app.estimate.matsaev import Polynomial
from app.groups.finite_group import FiniteGroup, coboundary
from app.linalg.streams import ginibre, haar_unitary
from app.superop.superoperator import SuperOperator, kraus_map, opposite


def random_map(rng: np.random.Generator, n: int, m: Optional[int] = None) -> SuperOperator:
    """Map M_n → M_m with a Ginibre Choi matrix scaled by 1/(n·m)."""
    m = n if m is None else m
    choi = ginibre(rng, n * m) / (n * m)
    return SuperOperator(n, m, choi)


def random_cp_map(rng: np.random.Generator, n: int, m: Optional[int] = None, rank: int = 2) -> SuperOperator:
    """Completely positive map with ``rank`` Gaussian Kraus operators."""
    m = n if m is None else m
    kraus = [ginibre(rng, m, n) / np.sqrt(rank * n) for _ in range(rank)]
    return kraus_map(kraus)


def random_selfadjoint_map(rng: np.random.Generator, n: int, m: Optional[int] = None) -> SuperOperator:
    """(T + T°)/2 for a random T, so that T(x*) = T(x)*."""
    t = random_map(rng, n, m)
    return (t + opposite(t)) * 0.5


def random_schur_symbol(rng: np.random.Generator, n: int, real: bool = False) -> np.ndarray:
    if real:
        return rng.standard_normal((n, n)) / np.sqrt(n)
    return ginibre(rng, n) / np.sqrt(n)


def random_rectangular(rng: np.random.Generator, max_dim: int = 6) -> np.ndarray:
    rows, cols = (int(v) for v in rng.integers(1, max_dim + 1, size=2))
    return ginibre(rng, rows, cols)


def random_coboundary(group: FiniteGroup, rng: np.random.Generator):
    """σ(s,t) = β(s)β(t)/β(st) for random phases β with β(e) = 1."""
    beta = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, group.order))
    beta[group.identity] = 1.0
    return coboundary(group, beta)


def random_polynomial(rng: np.random.Generator, max_degree: int = 6) -> Polynomial:
    """Complex polynomial of degree 1..max_degree with Gaussian coefficients."""
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = ginibre(rng, degree + 1, 1)[:, 0]
    if coeffs[-1] == 0:
        coeffs[-1] = 1.0
    return Polynomial(coeffs)


def random_unitary_images(rng: np.random.Generator, k: int, m: int):
    return [haar_unitary(rng, m) for _ in range(k)]
