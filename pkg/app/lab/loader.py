"""Input file loader - JSON maps, groups and symbols."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from app.errors import MatrixFileError
from app.groups.algebra import GroupAlgebra, build_algebra, fourier_multiplier, schur_multiplier
from app.groups.finite_group import FiniteGroup, TwoCocycle
from app.models.schemas import GroupFile, MatrixFile, SuperOperatorFile, SymbolFile
from app.superop.superoperator import SuperOperator

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)


def _parse(model: Type[Model], data: Dict[str, Any], source: str) -> Model:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise MatrixFileError(f"{source}: not a valid {model.__name__}: {e}") from e


def read_json(filepath: Union[str, Path]) -> Dict[str, Any]:
    """Load a JSON document, raising MatrixFileError for unreadable or non-JSON files."""
    path = Path(filepath)
    if path.suffix != ".json":
        raise MatrixFileError(f"Unsupported file format: {path.suffix}")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise MatrixFileError(f"cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise MatrixFileError(f"{path}: expected a JSON object at top level")
    return data


def file_digest(filepath: Union[str, Path]) -> str:
    """SHA-256 of the raw file bytes, recorded in reports."""
    return hashlib.sha256(Path(filepath).read_bytes()).hexdigest()


def map_from_dict(data: Dict[str, Any], source: str = "<dict>") -> SuperOperator:
    """Build a map from the superoperator file format.

    Expected format:
    {
        "in_dim": n, "out_dim": m,
        "choi": {"rows": n*m, "cols": n*m, "re": [...], "im": [...]}
    }
    """
    parsed = _parse(SuperOperatorFile, data, source)
    return SuperOperator(parsed.in_dim, parsed.out_dim, parsed.choi.to_array())


def map_to_dict(t: SuperOperator, name: Optional[str] = None) -> Dict[str, Any]:
    return SuperOperatorFile(
        in_dim=t.in_dim, out_dim=t.out_dim, choi=MatrixFile.from_array(t.choi), name=name
    ).model_dump(exclude_none=True)


def group_from_dict(data: Dict[str, Any], source: str = "<dict>") -> GroupAlgebra:
    """Build the twisted group algebra described by a group file (trivial cocycle if omitted)."""
    parsed = _parse(GroupFile, data, source)
    return _algebra_from_model(parsed)


def _algebra_from_model(parsed: GroupFile) -> GroupAlgebra:
    group = FiniteGroup(
        np.asarray(parsed.cayley),
        name=parsed.name or f"G{parsed.order}",
        labels=tuple(parsed.labels or ()),
    )
    if parsed.cocycle_re is None and parsed.cocycle_im is None:
        return build_algebra(group)
    n = parsed.order
    re = np.ones((n, n)) if parsed.cocycle_re is None else np.asarray(parsed.cocycle_re, dtype=float)
    im = np.zeros((n, n)) if parsed.cocycle_im is None else np.asarray(parsed.cocycle_im, dtype=float)
    return build_algebra(group, TwoCocycle(group, re + 1j * im, name="file"))


def group_to_dict(alg: GroupAlgebra) -> Dict[str, Any]:
    sigma = alg.cocycle.sigma
    model = GroupFile(
        order=alg.order,
        cayley=alg.group.cayley.tolist(),
        cocycle_re=None if alg.cocycle.is_trivial else sigma.real.tolist(),
        cocycle_im=None if alg.cocycle.is_trivial else sigma.imag.tolist(),
        name=alg.group.name,
        labels=list(alg.group.labels),
    )
    return model.model_dump(exclude_none=True)


def symbol_from_dict(data: Dict[str, Any], source: str = "<dict>") -> Tuple[str, np.ndarray, Optional[GroupAlgebra]]:
    """Parse a symbol file into (kind, values, algebra); the algebra is None for Schur symbols."""
    parsed = _parse(SymbolFile, data, source)
    try:
        values = np.asarray(parsed.values, dtype=float)
        if parsed.values_im is not None:
            values = values + 1j * np.asarray(parsed.values_im, dtype=float)
    except (TypeError, ValueError) as e:
        raise MatrixFileError(f"{source}: symbol values must be numeric: {e}") from e
    if parsed.values_im is not None and np.asarray(parsed.values_im).shape != np.asarray(parsed.values).shape:
        raise MatrixFileError(f"{source}: values_im must match the shape of values")
    alg = _algebra_from_model(parsed.group) if parsed.kind == "fourier" else None
    return parsed.kind, values, alg


def symbol_to_dict(kind: str, values, alg: Optional[GroupAlgebra] = None) -> Dict[str, Any]:
    values = np.asarray(values, dtype=complex)
    model = SymbolFile(
        kind=kind,
        values=values.real.tolist(),
        values_im=values.imag.tolist() if np.any(values.imag) else None,
        group=None if alg is None else GroupFile(**group_to_dict(alg)),
    )
    return model.model_dump(exclude_none=True)


def load_operand(filepath: Union[str, Path]) -> Tuple[SuperOperator, Optional[GroupAlgebra], Optional[str]]:
    """Load a map file or a symbol file; symbols are turned into their multipliers.

    Returns:
        (map, algebra of a Fourier symbol or None, symbol kind or None)
    """
    data = read_json(filepath)
    if "kind" not in data:
        return map_from_dict(data, str(filepath)), None, None
    kind, values, alg = symbol_from_dict(data, str(filepath))
    t = fourier_multiplier(alg, values) if kind == "fourier" else schur_multiplier(values)
    return t, alg, kind


def load_map(filepath: Union[str, Path]) -> SuperOperator:
    return load_operand(filepath)[0]


def load_group(filepath: Union[str, Path]) -> GroupAlgebra:
    return group_from_dict(read_json(filepath), str(filepath))


def load_symbol(filepath: Union[str, Path]):
    return symbol_from_dict(read_json(filepath), str(filepath))


def write_json(filepath: Union[str, Path], data: Any) -> Path:
    path = Path(filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    logger.info(f"wrote {path}")
    return path
