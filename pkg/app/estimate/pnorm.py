"""Lower bounds for ‖T ⊗ Id_{S^p_d}‖ between Schatten classes by power-type ascent.

Each restart runs the fixed-point iteration X ← J_{p*}(A†(J_p(A X))) on the unit
sphere of S^p, where A = Id_d ⊗ T and J_q is the norming functional in S^q. The
iteration never decreases ‖A X‖_p. The exponents 1 and ∞ are smoothed for the
iteration and the final witness is polished and evaluated at the true exponent,
so every reported value is attained by its witness.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from app.config import config
from app.errors import DimensionMismatch
from app.groups.algebra import GroupAlgebra
from app.linalg.core import (
    INF,
    check_exponent,
    dual_exponent,
    duality_map,
    matrix_unit,
    polar,
    schatten_norm,
    svd,
    unvec,
    vec,
)
from app.linalg.streams import generator, ginibre, rank_one
from app.models.schemas import MatrixFile, NormEstimateRecord
from app.superop.superoperator import SuperOperator, amplify, liouville

logger = logging.getLogger(__name__)

SMOOTH_EXPONENT = 1.001
REL_CONVERGED = 1e-6


@dataclass(frozen=True, eq=False)
class NormEstimate:
    """Certified lower bound: value = ‖(Id_d ⊗ T)(witness)‖_p / ‖witness‖_p."""
    value: float
    p: float
    d: int
    witness: np.ndarray
    restarts: int
    seed: int
    converged_restarts: int
    exact: bool = False

    def to_record(self) -> NormEstimateRecord:
        return NormEstimateRecord(
            value=self.value,
            p="inf" if self.p == INF else repr(self.p),
            d=self.d,
            restarts=self.restarts,
            seed=self.seed,
            converged_restarts=self.converged_restarts,
            exact=self.exact,
            witness=MatrixFile.from_array(self.witness),
        )


def amplified_ratio(t: SuperOperator, x: np.ndarray, p: float, d: int = 1) -> float:
    """‖(Id_d ⊗ T)(X)‖_p / ‖X‖_p."""
    a = amplify(t, d)
    return schatten_norm(a(x), p) / schatten_norm(x, p)


def exact_p2_norm(t: SuperOperator):
    """Exact S²→S² norm: the top singular value of the Liouville matrix, with its witness."""
    u, s, v = svd(liouville(t))
    witness = unvec(v[:, 0], t.in_dim, t.in_dim)
    return float(s[0]), witness


def _ascent_exponent(p: float) -> float:
    if p == 1.0:
        return SMOOTH_EXPONENT
    if p == INF:
        return dual_exponent(SMOOTH_EXPONENT)
    return p


class _Ascent:
    """Power-type ascent for one amplified map, shared by all restarts."""

    def __init__(self, a: SuperOperator, p: float, max_iter: int):
        self.lmat = liouville(a)
        self.n_in = a.in_dim
        self.n_out = a.out_dim
        self.p = p
        self.q = _ascent_exponent(p)
        self.q_dual = dual_exponent(self.q)
        self.max_iter = max_iter

    def image(self, x: np.ndarray) -> np.ndarray:
        return unvec(self.lmat @ vec(x), self.n_out, self.n_out)

    def ratio(self, x: np.ndarray, p: float) -> float:
        norm = schatten_norm(x, p)
        if norm == 0.0:
            return 0.0
        return schatten_norm(self.image(x), p) / norm

    def run(self, x0: np.ndarray):
        if not np.any(x0):
            return x0, 0.0
        x = x0 / schatten_norm(x0, self.q)
        best_x, best_val = x, -1.0
        for _ in range(self.max_iter):
            y = self.image(x)
            val = schatten_norm(y, self.q)
            if val <= best_val * (1.0 + 1e-12):
                break
            best_x, best_val = x, val
            if val == 0.0:
                break
            z = unvec(self.lmat.conj().T @ vec(duality_map(y, self.q)), self.n_in, self.n_in)
            if not np.any(z):
                break
            x = duality_map(z, self.q_dual)
        return self._polish(best_x, x0)

    def _polish(self, x: np.ndarray, start: np.ndarray):
        candidates = [x, start]
        if self.p == INF:
            candidates.append(polar(x)[0])
        elif self.p == 1.0:
            u, _, v = svd(x)
            candidates.append(np.outer(u[:, 0], v[:, 0].conj()))
        scored = [(self.ratio(c, self.p), i) for i, c in enumerate(candidates)]
        value, idx = max(scored, key=lambda pair: (pair[0], -pair[1]))
        witness = candidates[idx]
        return witness / schatten_norm(witness, self.p), value


def _structured_starts(n: int, d: int, algebra: Optional[GroupAlgebra]) -> List[np.ndarray]:
    """Matrix units, the unit and algebra generators in the top-left copy of M_n, plus flip-type elements."""
    size = d * n
    starts = [matrix_unit(i, j, size) for i in range(n) for j in range(n)]
    corner = np.zeros((size, size), dtype=complex)
    corner[:n, :n] = np.eye(n)
    starts.append(corner)
    if algebra is not None and algebra.order == n:
        for s in range(algebra.order):
            x = np.zeros((size, size), dtype=complex)
            x[:n, :n] = algebra.lambdas[s]
            starts.append(x)
    k = min(d, n)
    if k > 1:
        flip = np.zeros((d, n, d, n), dtype=complex)
        omega = np.zeros((d, n, d, n), dtype=complex)
        for a in range(k):
            for b in range(k):
                flip[a, b, b, a] = 1.0
                omega[a, a, b, b] = 1.0
        starts.extend([flip.reshape(size, size), omega.reshape(size, size)])
    return starts


def _random_starts(n: int, d: int, restarts: int, seed: int) -> List[np.ndarray]:
    size = d * n
    starts = []
    for r in range(restarts):
        rng = generator(seed, "pnorm", d, r)
        starts.append(ginibre(rng, size) if r % 2 == 0 else rank_one(rng, size))
    return starts


def _embed(x: np.ndarray, n: int, d_from: int, d_to: int) -> np.ndarray:
    """Corner embedding M_{d_from}(M_n) ⊂ M_{d_to}(M_n)."""
    out = np.zeros((d_to * n, d_to * n), dtype=complex)
    out[:d_from * n, :d_from * n] = x
    return out


def _run_level(t: SuperOperator, p: float, d: int, starts: Sequence[np.ndarray], max_iter: int, workers: int):
    ascent = _Ascent(amplify(t, d), p, max_iter)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(ascent.run, starts))
    else:
        results = [ascent.run(x) for x in starts]
    for i, (_, val) in enumerate(results):
        logger.debug(f"restart {i} at d={d}, p={p}: {val:.12g}")
    return ascent, results


def pq_norm_lower(
    t: SuperOperator,
    p: float,
    d: int = 1,
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
    algebra: Optional[GroupAlgebra] = None,
    max_iter: Optional[int] = None,
    workers: Optional[int] = None,
) -> NormEstimate:
    """Lower bound for the norm of Id_{M_d} ⊗ T on S^p_d(S^p_n) → S^p_d(S^p_m).

    Args:
        t: Map M_n → M_m
        p: Schatten exponent in [1, ∞] (``math.inf`` for the operator norm)
        d: Amplification degree
        restarts: Random restarts per degree (defaults to ``config.LAB_RESTARTS``)
        seed: Master seed (defaults to ``config.LAB_SEED``)
        algebra: Group algebra whose generators are added to the structured starts
        max_iter: Ascent iterations per restart (defaults to ``config.PNORM_MAX_ITER``)
        workers: Thread count (defaults to ``config.PNORM_WORKERS``)

    Returns:
        NormEstimate whose witness attains the value; exact at p = 2. For fixed seed
        the value is nondecreasing in d, since the winning witness of degree d − 1
        is carried into degree d by the corner embedding.
    """
    p = check_exponent(p)
    if d < 1:
        raise DimensionMismatch(f"amplification degree must be >= 1, got {d}")
    restarts = config.LAB_RESTARTS if restarts is None else restarts
    seed = config.LAB_SEED if seed is None else seed
    max_iter = max_iter or config.PNORM_MAX_ITER
    workers = workers or config.PNORM_WORKERS
    n = t.in_dim

    if p == 2.0:
        value, witness = exact_p2_norm(t)
        if d > 1:
            witness = _embed(witness, n, 1, d)
        return NormEstimate(value, p, d, witness, 0, seed, 0, exact=True)

    best_value, best_witness, converged, total = -1.0, None, 0, 0
    for level in range(1, d + 1):
        starts = _structured_starts(n, level, algebra) + _random_starts(n, level, restarts, seed)
        ascent, results = _run_level(t, p, level, starts, max_iter, workers)
        candidates = list(results)
        if best_witness is not None:
            carried = _embed(best_witness, n, level - 1, level)
            candidates.append((carried, ascent.ratio(carried, p)))
        level_value, level_witness = -1.0, None
        for x, val in candidates:
            if val > level_value:
                level_value, level_witness = val, x
        best_value, best_witness = level_value, level_witness
        converged = sum(1 for _, val in results if val >= best_value * (1.0 - REL_CONVERGED))
        total = len(starts)

    logger.debug(f"pq_norm_lower p={p} d={d}: {best_value:.12g} ({converged}/{total} restarts converged)")
    return NormEstimate(
        value=float(best_value),
        p=p,
        d=d,
        witness=best_witness,
        restarts=restarts,
        seed=seed,
        converged_restarts=converged,
    )
