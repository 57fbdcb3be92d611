"""Sample inputs: standard maps, unitary rows and twisted group algebras."""

from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from app.errors import DimensionMismatch
from app.groups.algebra import GroupAlgebra, build_algebra
from app.groups.finite_group import bicharacter_cocycle, cyclic_group, direct_product
from app.lab.loader import group_to_dict, map_to_dict, symbol_to_dict, write_json
from app.superop.superoperator import SuperOperator, identity_map, transpose_map, unitary_row_map

# Pauli matrices
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Clock and shift on C^3
OMEGA3 = np.exp(2j * np.pi / 3)
CLOCK = np.diag([1, OMEGA3, OMEGA3 ** 2])
SHIFT = np.roll(np.eye(3, dtype=complex), 1, axis=0)

# Expected decomposable norms at p = ∞ (n^{1-1/p} = n)
UNITARY_ROW_NORMS = {2: 2.0, 3: 3.0}


def pauli_row() -> SuperOperator:
    """ℓ^∞_2 → M_2, e_1 ↦ X, e_2 ↦ Z."""
    return unitary_row_map([PAULI_X, PAULI_Z])


def clock_shift_row() -> SuperOperator:
    """ℓ^∞_3 → M_3, e_k ↦ clock, shift, clock·shift."""
    return unitary_row_map([CLOCK, SHIFT, CLOCK @ SHIFT])


def unitary_row(n: int) -> SuperOperator:
    if n == 2:
        return pauli_row()
    if n == 3:
        return clock_shift_row()
    raise DimensionMismatch(f"no sample unitary row for n={n}")


def pauli_algebra() -> GroupAlgebra:
    """Z_2 × Z_2 with the Pauli cocycle; its twisted group algebra is M_2."""
    group = direct_product(cyclic_group(2), cyclic_group(2))
    return build_algebra(group, bicharacter_cocycle(2, group))


def sample_symbol() -> np.ndarray:
    """Real symbol on Z_2 × Z_2 with ‖M_φ‖_dec ≤ 1."""
    return np.array([1.0, 0.5, -0.25, 0.0])


def sample_maps() -> Dict[str, SuperOperator]:
    return {
        "identity": identity_map(2),
        "transpose2": transpose_map(2),
        "transpose3": transpose_map(3),
        "pauli_row": pauli_row(),
        "clock_shift_row": clock_shift_row(),
    }


def write_samples(out_dir: Union[str, Path]) -> List[Path]:
    """Write every sample input as JSON into out_dir."""
    out = Path(out_dir)
    written = [write_json(out / f"{name}.json", map_to_dict(t, name)) for name, t in sample_maps().items()]
    alg = pauli_algebra()
    written.append(write_json(out / "pauli_group.json", group_to_dict(alg)))
    written.append(write_json(out / "pauli_symbol.json", symbol_to_dict("fourier", sample_symbol(), alg)))
    return written
