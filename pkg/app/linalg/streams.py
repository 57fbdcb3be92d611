"""Counter-based random streams keyed by (seed, label) and random matrix draws."""

import zlib
from typing import Optional

import numpy as np

_MASK = (1 << 64) - 1


def stream_id(*labels) -> int:
    """Stable 32-bit id of a label path such as ("pnorm", 2, 17)."""
    return zlib.crc32("/".join(str(label) for label in labels).encode("utf-8"))


def generator(seed: int, *labels) -> np.random.Generator:
    """Philox generator keyed by the master seed and a stream label path."""
    key = np.array([int(seed) & _MASK, stream_id(*labels)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def ginibre(rng: np.random.Generator, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Matrix with i.i.d. standard complex Gaussian entries."""
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def rank_one(rng: np.random.Generator, rows: int, cols: Optional[int] = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return np.outer(ginibre(rng, rows, 1)[:, 0], ginibre(rng, cols, 1)[:, 0].conj())


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase correction)."""
    q, r = np.linalg.qr(ginibre(rng, n))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
