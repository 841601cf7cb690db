"""
Domain models shared by every pipeline stage.

All pipeline stages produce and consume these Pydantic v2 models. Numeric
payloads are numpy arrays frozen read-only after validation.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

__all__ = [
    "SumParams",
    "CesaroConfig",
    "ShellCountTable",
    "PartialSumSeries",
    "PhaseShellTable",
    "BlockIndex",
    "BlockSum",
    "KernelParams",
    "GreenEvaluation",
    "Point3",
]

Point3 = tuple[float, float, float]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------

class SumParams(BaseModel):
    """Target of the generalized Madelung sum: terms (a² + |k|²)^(−s)."""
    model_config = ConfigDict(frozen=True)

    a: float = Field(0.0, description="Screening parameter; enters as a²")
    s: float = Field(..., gt=0, description="Exponent")
    dim: int = Field(3, ge=1, description="Lattice dimension d")

    @property
    def a2(self) -> float:
        return self.a * self.a


class CesaroConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa: float = Field(0.0, ge=0, description="Cesàro order κ; 0 is plain summation")
    max_n: int = Field(..., ge=1, description="Cutoff N on the squared radius")


class KernelParams(BaseModel):
    """Parameters of the whole-space kernel of (a² − Δ)^s in three dimensions."""
    model_config = ConfigDict(frozen=True)

    a: float = Field(..., ge=0)
    s: float = Field(..., gt=0, lt=1.5)

    @property
    def nu(self) -> float:
        return 1.5 - self.s


# ---------------------------------------------------------------------------
# Shell tables
# ---------------------------------------------------------------------------

class ShellCountTable(BaseModel):
    """r_d(n) for n = 0..max_n."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(..., ge=1)
    max_n: int = Field(..., ge=0)
    counts: np.ndarray

    @field_validator("counts", mode="before")
    @classmethod
    def _as_uint64(cls, v):
        arr = np.array(v, dtype=np.uint64)
        if arr.ndim != 1:
            raise ValueError("counts must be one-dimensional")
        return _frozen(arr)

    @model_validator(mode="after")
    def _check_length(self):
        if len(self.counts) != self.max_n + 1:
            raise ValueError(
                f"counts has {len(self.counts)} entries, expected {self.max_n + 1}"
            )
        return self


class PhaseShellTable(BaseModel):
    """Phase-weighted shell sums Σ_{|k|²=n} e^{ik·x} for n = 0..max_n.

    Shells are closed under k → −k, so every entry is real; the imaginary
    part is stored as exact zero.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: Point3
    max_n: int = Field(..., ge=1)
    sums: np.ndarray

    @field_validator("sums", mode="before")
    @classmethod
    def _as_complex(cls, v):
        return _frozen(np.array(v, dtype=np.complex128))

    @model_validator(mode="after")
    def _check_length(self):
        if len(self.sums) != self.max_n + 1:
            raise ValueError("sums must cover n = 0..max_n")
        return self


# ---------------------------------------------------------------------------
# Partial sums
# ---------------------------------------------------------------------------

class PartialSumSeries(BaseModel):
    """values[N−1] is the partial sum at cutoff N."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method: str = Field(..., description="plain | cesaro(κ) | fourier-cesaro(κ, x)")
    params: SumParams
    kappa: float = 0.0
    x: Optional[Point3] = None
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _finite(cls, v):
        arr = np.array(v, dtype=np.float64)
        if arr.ndim != 1 or len(arr) == 0:
            raise ValueError("values must be a non-empty sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series contains non-finite values")
        return _frozen(arr)

    @property
    def max_n(self) -> int:
        return len(self.values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"N": np.arange(1, self.max_n + 1), "value": self.values}
        )


# ---------------------------------------------------------------------------
# Rectangles
# ---------------------------------------------------------------------------

class BlockIndex(BaseModel):
    """Block covering [2I,2I+1]×[2J,2J+1]×[2K,2K+1]."""
    model_config = ConfigDict(frozen=True)

    I: int
    J: int
    K: int

    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        i, j, k = np.meshgrid(
            [2 * self.I, 2 * self.I + 1],
            [2 * self.J, 2 * self.J + 1],
            [2 * self.K, 2 * self.K + 1],
            indexing="ij",
        )
        return i.ravel(), j.ravel(), k.ravel()


class BlockSum(BaseModel):
    params: SumParams
    radius: int = Field(..., ge=1, description="Chebyshev block radius R")
    value: float
    tail_bound: float = Field(..., ge=0, description="Bound on the omitted blocks")


# ---------------------------------------------------------------------------
# Green functions
# ---------------------------------------------------------------------------

class GreenEvaluation(BaseModel):
    x: Point3
    value: float
    truncation_radius: int = Field(..., ge=1)
    error_estimate: float = Field(..., ge=0)

    @field_validator("value")
    @classmethod
    def _finite_value(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("non-finite Green function value")
        return v
