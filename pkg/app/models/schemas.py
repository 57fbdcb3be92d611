"""Pydantic models for input files, solver snapshots and experiment reports."""

import math
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class MatrixFile(BaseModel):
    """Dense complex matrix stored as row-major real and imaginary parts."""
    rows: int = Field(..., ge=1, description="Number of rows")
    cols: int = Field(..., ge=1, description="Number of columns")
    re: List[float] = Field(..., description="Real parts, row-major")
    im: Optional[List[float]] = Field(None, description="Imaginary parts, row-major (zero if omitted)")

    @field_validator("re", "im")
    @classmethod
    def finite_entries(cls, v):
        if v is not None and not all(math.isfinite(x) for x in v):
            raise ValueError("matrix entries must be finite")
        return v

    @model_validator(mode="after")
    def consistent_lengths(self):
        size = self.rows * self.cols
        if len(self.re) != size:
            raise ValueError(f"re has {len(self.re)} entries, expected rows*cols = {size}")
        if self.im is not None and len(self.im) != size:
            raise ValueError(f"im has {len(self.im)} entries, expected rows*cols = {size}")
        return self

    @classmethod
    def from_array(cls, x) -> "MatrixFile":
        arr = np.asarray(x, dtype=complex)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {arr.shape}")
        im = arr.imag.reshape(-1)
        return cls(
            rows=arr.shape[0],
            cols=arr.shape[1],
            re=arr.real.reshape(-1).tolist(),
            im=im.tolist() if np.any(im) else None,
        )

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=float)
        im = np.zeros_like(re) if self.im is None else np.asarray(self.im, dtype=float)
        return (re + 1j * im).reshape(self.rows, self.cols)


class SuperOperatorFile(BaseModel):
    """Linear map M_n -> M_m given by its Choi matrix."""
    in_dim: int = Field(..., ge=1)
    out_dim: int = Field(..., ge=1)
    choi: MatrixFile
    name: Optional[str] = None

    @model_validator(mode="after")
    def choi_shape(self):
        size = self.in_dim * self.out_dim
        if (self.choi.rows, self.choi.cols) != (size, size):
            raise ValueError(f"Choi matrix must be {size}x{size}, got {self.choi.rows}x{self.choi.cols}")
        return self


class GroupFile(BaseModel):
    """Finite group by Cayley table with an optional unimodular 2-cocycle."""
    order: int = Field(..., ge=1, le=64)
    cayley: List[List[int]]
    cocycle_re: Optional[List[List[float]]] = None
    cocycle_im: Optional[List[List[float]]] = None
    name: Optional[str] = None
    labels: Optional[List[str]] = None

    @model_validator(mode="after")
    def table_shapes(self):
        n = self.order
        tables = {"cayley": self.cayley, "cocycle_re": self.cocycle_re, "cocycle_im": self.cocycle_im}
        for key, table in tables.items():
            if table is not None and (len(table) != n or any(len(row) != n for row in table)):
                raise ValueError(f"{key} must be an {n}x{n} table")
        return self


class SymbolFile(BaseModel):
    """Multiplier symbol: a function on a group (fourier) or a square matrix (schur)."""
    kind: Literal["fourier", "schur"]
    values: List[Any] = Field(..., description="Fourier: one value per element; Schur: rows of the symbol")
    values_im: Optional[List[Any]] = None
    group: Optional[GroupFile] = None

    @model_validator(mode="after")
    def symbol_shape(self):
        if self.kind == "fourier":
            if self.group is None:
                raise ValueError("fourier symbols need a group")
            if len(self.values) != self.group.order:
                raise ValueError(f"fourier symbol needs {self.group.order} values, got {len(self.values)}")
        else:
            n = len(self.values)
            if any(not isinstance(row, list) or len(row) != n for row in self.values):
                raise ValueError("schur symbol must be a square table")
        return self


class NormEstimateRecord(BaseModel):
    """Replayable lower bound for ‖T ⊗ Id_{S^p_d}‖."""
    value: float
    p: str = Field(..., description="Schatten exponent, 'inf' for the operator norm")
    d: int
    restarts: int
    seed: int
    converged_restarts: int
    exact: bool = False
    witness: MatrixFile


class SdpSolutionRecord(BaseModel):
    """Snapshot of one solved semidefinite program."""
    name: str
    status: str
    primal_objective: float
    dual_objective: float
    gap: float
    violation: float
    iterations: int


class AssertionRecord(BaseModel):
    """One checked statement, with the numbers that decided it."""
    suite: str
    name: str
    claim: str = Field(..., description="Mathematical statement under test")
    passed: bool
    observed: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    details: Dict[str, Any] = Field(default_factory=dict)


class ExperimentReport(BaseModel):
    """Result of one CLI command."""
    command: str
    seed: int
    parameters: Dict[str, Any] = Field(default_factory=dict)
    inputs_digest: Optional[str] = None
    results: Dict[str, Any] = Field(default_factory=dict)
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict)
    assertions: List[AssertionRecord] = Field(default_factory=list)
    solutions: List[SdpSolutionRecord] = Field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)
