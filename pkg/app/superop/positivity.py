"""Complete positivity and selfadjointness tests on the Choi side."""

import logging
from dataclasses import dataclass
from typing import List, Optional

import networkx as nx
import numpy as np

from app.config import config
from app.linalg.core import as_matrix, herm_eig, modulus
from app.superop.superoperator import (
    SuperOperator,
    abs_map,
    block2,
    commutative_map,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CpCertificate:
    """Outcome of a PSD test with its witness eigenpair."""
    is_cp: bool
    min_eigenvalue: float
    eigenvector: np.ndarray
    tolerance: float
    hermitian: bool = True

    def __bool__(self) -> bool:
        return self.is_cp


def sparsity_components(mat: np.ndarray, threshold: float = 0.0) -> List[List[int]]:
    """Index sets of the connected components of the sparsity graph of a square matrix.

    The matrix is block diagonal along these sets (after a permutation), so its
    spectrum is the union of the spectra of the diagonal blocks.
    """
    size = mat.shape[0]
    graph = nx.Graph()
    graph.add_nodes_from(range(size))
    rows, cols = np.nonzero(np.abs(mat) > threshold)
    graph.add_edges_from((int(r), int(c)) for r, c in zip(rows, cols) if r < c)
    return [sorted(comp) for comp in nx.connected_components(graph)]


def min_eigenpair(h: np.ndarray):
    """Smallest eigenvalue and eigenvector of a Hermitian matrix, one sparsity block at a time."""
    h = as_matrix(h, "H")
    size = h.shape[0]
    threshold = 1e-15 * (1.0 + float(np.max(np.abs(h))))
    best_value, best_vector = np.inf, None
    for comp in sparsity_components(h, threshold):
        idx = np.asarray(comp)
        spectrum = herm_eig(h[np.ix_(idx, idx)])
        if spectrum.min_eigenvalue < best_value:
            best_value = spectrum.min_eigenvalue
            best_vector = np.zeros(size, dtype=complex)
            best_vector[idx] = spectrum.min_eigenvector
    return float(best_value), best_vector


def is_psd(h, tol: Optional[float] = None) -> CpCertificate:
    """λ_min(h) ≥ −tol·max(1, |trace h|) for a (numerically) Hermitian matrix."""
    h = as_matrix(h, "H")
    base_tol = config.PSD_TOL if tol is None else tol
    tolerance = base_tol * max(1.0, abs(np.trace(h)))
    scale = 1.0 + float(np.linalg.norm(h))
    hermitian = float(np.linalg.norm(h - h.conj().T)) <= 1e-10 * scale
    value, vector = min_eigenpair(0.5 * (h + h.conj().T))
    return CpCertificate(
        is_cp=bool(hermitian and value >= -tolerance),
        min_eigenvalue=float(value),
        eigenvector=vector,
        tolerance=tolerance,
        hermitian=hermitian,
    )


def is_cp(t: SuperOperator, tol: Optional[float] = None) -> CpCertificate:
    """Choi test for complete positivity.

    Args:
        t: Map to test
        tol: PSD slack, scaled by |trace(choi)| (defaults to ``config.PSD_TOL``)

    Returns:
        Certificate whose truth value is the verdict; it carries the minimal
        Choi eigenvalue and its eigenvector
    """
    cert = is_psd(t.choi, tol)
    if not cert.is_cp:
        logger.debug(f"map M_{t.in_dim}->M_{t.out_dim} not CP: lambda_min={cert.min_eigenvalue:.3e}")
    return cert


def is_selfadjoint_map(t: SuperOperator, tol: float = 1e-10) -> bool:
    """T(x*) = T(x)* checked on every matrix unit."""
    c = t.tensor
    images_of_adjoint_units = c.transpose(2, 1, 0, 3)    # [i,k,j,l] = T(e_ji)[k,l]
    adjoint_images = np.conj(c.transpose(0, 3, 2, 1))    # [i,k,j,l] = conj(T(e_ij)[l,k])
    diff = images_of_adjoint_units - adjoint_images
    per_unit = np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 3)))
    return bool(np.max(per_unit) <= tol)


def modulus_block_check(b, tol: Optional[float] = None) -> CpCertificate:
    """CP test of [[|B|, B], [B°, |B|]] for a map between commutative algebras.

    ``b`` is the coordinate matrix of T: ℓ^∞_n → ℓ^∞_m and |B| its entrywise modulus.
    """
    b = as_matrix(b, "B")
    t = commutative_map(b)
    v = abs_map(b)
    return is_cp(block2(v, t, v).assembled, tol)


def contraction_block(b) -> np.ndarray:
    """[[|b*|, b], [b*, |b|]], positive for every b."""
    b = as_matrix(b, "b")
    return np.block([[modulus(b.conj().T), b], [b.conj().T, modulus(b)]])
