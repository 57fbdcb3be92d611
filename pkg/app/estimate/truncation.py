"""Growth of the triangular truncation and the iterated-limit test for Schur symbols."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from app.errors import DimensionMismatch
from app.groups.algebra import triangular_symbol
from app.linalg.core import as_matrix
from app.sdp.norms import schur_cb_norm
from app.sdp.problem import SdpOptions

logger = logging.getLogger(__name__)

MAX_TRUNCATION = 64


@dataclass(frozen=True)
class TruncationRow:
    n: int
    norm: float
    sqrt_bound: float
    p2_norm: float
    certified: bool

    @property
    def within_bound(self) -> bool:
        return self.norm <= self.sqrt_bound + 1e-6


def truncation_growth(n_list: Sequence[int], options: Optional[SdpOptions] = None) -> List[TruncationRow]:
    """Norm of the triangular truncation on B(ℓ²_n) for each n.

    Each row also carries the S² norm max|a_ij| = 1 and the bound √n·‖M_A‖_{S²}.
    """
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DimensionMismatch(f"n_list must be strictly ascending positive sizes, got {ns}")
    if ns[-1] > MAX_TRUNCATION:
        raise DimensionMismatch(f"truncation sizes are limited to {MAX_TRUNCATION}")
    rows = []
    for n in ns:
        a = triangular_symbol(n)
        result = schur_cb_norm(a, options)
        p2 = float(np.max(np.abs(a)))
        row = TruncationRow(n, result.value, math.sqrt(n) * p2, p2, result.certified)
        if not row.within_bound:
            logger.error(f"triangular truncation n={n}: {row.norm:.8f} exceeds sqrt(n) bound {row.sqrt_bound:.8f}")
        logger.info(f"triangular truncation n={n}: {row.norm:.8f}")
        rows.append(row)
    return rows


def is_increasing(rows: Sequence[TruncationRow], start: int = 2) -> bool:
    """Strict growth of the norms for sizes ≥ start."""
    values = [r.norm for r in rows if r.n >= start]
    return all(b > a for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class LimitCriterion:
    """Iterated limits of a symbol read off a finite section whose last index plays ∞."""
    s: complex
    t: complex
    gap: float
    row_spread: float
    col_spread: float


def _check_tail(tail: Sequence[int], last: int, label: str) -> List[int]:
    idx = [int(i) for i in tail]
    if len(idx) < 3:
        raise DimensionMismatch(f"{label} needs at least 3 indices, got {len(idx)}")
    if any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 0 or idx[-1] >= last:
        raise DimensionMismatch(f"{label} must be increasing and lie strictly before index {last}")
    return idx


def schur_limit_criterion(a, row_tail: Sequence[int], col_tail: Sequence[int]) -> LimitCriterion:
    """s = lim_i lim_j a_ij and t = lim_j lim_i a_ij on a finite section.

    The inner limits are read at the last column (for s) and the last row (for t),
    the outer ones at the end of the supplied tails. The spreads are the ranges of
    the values along each tail.
    """
    a = as_matrix(a, "A")
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"symbol must be square, got shape {a.shape}")
    last = a.shape[0] - 1
    rows = _check_tail(row_tail, last, "row_tail")
    cols = _check_tail(col_tail, last, "col_tail")
    s_values = a[rows, last]
    t_values = a[last, cols]
    s, t = complex(s_values[-1]), complex(t_values[-1])
    return LimitCriterion(
        s=s,
        t=t,
        gap=abs(s - t),
        row_spread=float(np.max(np.abs(s_values - s))),
        col_spread=float(np.max(np.abs(t_values - t))),
    )
